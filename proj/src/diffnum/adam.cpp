#include "csr/diffnum/adam.hpp"

#include <cmath>

namespace csr::diffnum {

void adam_step(ParamStore& store, const AdamConfig& config) {
  const std::uint64_t step = store.step() + 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  for (Parameter& p : store.params()) {
    double* value = p.value.data();
    double* grad = p.grad.data();
    double* m = p.adam_m.data();
    double* v = p.adam_v.data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = grad[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      value[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
      grad[i] = 0.0;
    }
  }
  store.set_step(step);
}

}  // namespace csr::diffnum
