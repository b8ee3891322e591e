#pragma once

#include <cstddef>
#include <vector>

#include "csr/diffnum/tensor.hpp"

namespace csr::train {

using diffnum::Tensor;

// Euclidean error of every (pedestrian, step): [R, delta] from two
// [R, 2 delta] trajectories.
Tensor step_errors(const Tensor& gt, const Tensor& pred);

// Mean of one row of step errors, and its final entry.
double row_ade(const Tensor& errors, std::size_t row);
double row_fde(const Tensor& errors, std::size_t row);

struct DisplacementErrors {
  double ade = 0.0;
  double fde = 0.0;
  std::vector<double> per_frame;  // mean error at each future step
};

// Averages over pedestrians (rows).
DisplacementErrors displacement_errors(const Tensor& errors);

}  // namespace csr::train
