#pragma once

#include "csr/diffnum/param_store.hpp"

namespace csr::diffnum {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update of every parameter from its accumulated
// gradient. Clears the gradients and increments the store's step counter.
void adam_step(ParamStore& store, const AdamConfig& config);

}  // namespace csr::diffnum
