#pragma once

#include <vector>

#include "csr/diffnum/tape.hpp"
#include "csr/diffnum/tensor.hpp"
#include "csr/model/model.hpp"

namespace csr::train {

using diffnum::Tape;
using diffnum::Tensor;
using diffnum::Var;

// Trajectories are [R, 2 delta] with (x, y) interleaved per step. Every loss
// is summed over steps and averaged over the R pedestrian rows.
struct LossReport {
  double l_ap = 0.0;   // mean over rows of sum_t |gt - pred|^2
  double l_kld = 0.0;  // mean over rows of sum_t KL(q || N(0, I))
  double l_r = 0.0;    // mean over rows of sum_t |gt - raw - offsets|
  double total = 0.0;  // l_ap + l_kld + l_r
};

// Tape versions, each a [1, 1] scalar.
Var loss_ap(Var gt, Var pred);
Var loss_kld(const std::vector<Var>& mu, const std::vector<Var>& log_var, std::size_t rows);
Var loss_r(Var gt, Var raw, Var offsets);

// Value versions for reporting and oracles.
double loss_ap(const Tensor& gt, const Tensor& pred);
double loss_kld(const std::vector<Tensor>& mu, const std::vector<Tensor>& log_var);
double loss_r(const Tensor& gt, const Tensor& raw, const Tensor& offsets);

struct TapeLosses {
  Var l_ap;
  Var l_kld;
  Var l_r;  // invalid (tape == nullptr) when the model has no refiner
  Var total;

  LossReport report() const;
};

// Assembles the multi-task loss of a training-mode forward pass. The
// regression term is zero without a refiner.
TapeLosses multitask_loss(Tape& tape, const model::Batch& batch, const model::ForwardResult& fwd);

}  // namespace csr::train
