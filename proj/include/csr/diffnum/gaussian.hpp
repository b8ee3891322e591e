#pragma once

#include <span>
#include <vector>

namespace csr::diffnum {

// Diagonal Gaussian in (mean, log-variance) form.
struct LatentGaussian {
  std::vector<double> mu;
  std::vector<double> log_var;
};

// mu + exp(0.5 * log_var) * noise.
std::vector<double> sample_reparameterized(const LatentGaussian& g,
                                           std::span<const double> noise);

// Closed-form KL(N(mu, exp(log_var)) || N(0, I)).
double kl_standard_normal(const LatentGaussian& g);

}  // namespace csr::diffnum
