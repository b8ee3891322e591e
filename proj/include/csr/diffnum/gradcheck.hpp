#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "csr/diffnum/param_store.hpp"

namespace csr::diffnum {

// Forward-only evaluation of one or more scalar losses at the store's
// current parameter values.
using LossVector = std::function<std::vector<double>(ParamStore&)>;

// Central differences (f(p+h) - f(p-h)) / 2h for every scalar of every
// parameter. Result is indexed [loss][flat parameter index], flattened in
// store order. Parameter values are restored exactly afterwards.
std::vector<std::vector<double>> central_differences(ParamStore& store,
                                                     const LossVector& losses,
                                                     double h = 1e-5);

// Store gradients flattened in the same order as central_differences.
std::vector<double> flatten_gradients(const ParamStore& store);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor);

GradCheckReport compare_gradients(const ParamStore& store,
                                  const std::vector<double>& analytic,
                                  const std::vector<double>& numeric, double floor);

}  // namespace csr::diffnum
