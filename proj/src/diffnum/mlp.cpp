#include "csr/diffnum/mlp.hpp"

#include <cmath>

#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"

namespace csr::diffnum {

std::size_t MlpSpec::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < layer_widths.size(); ++i) {
    n += layer_widths[i] * layer_widths[i + 1] + layer_widths[i + 1];
  }
  return n;
}

void MlpSpec::validate() const {
  if (layer_widths.size() < 2) throw UsageError("mlp spec needs at least two widths");
  for (std::size_t w : layer_widths) {
    if (w == 0) throw UsageError("mlp widths must be positive");
  }
}

Mlp::Mlp(ParamStore& store, std::string prefix, MlpSpec spec, std::mt19937_64& rng)
    : spec_(std::move(spec)), prefix_(std::move(prefix)) {
  spec_.validate();
  for (std::size_t l = 0; l + 1 < spec_.layer_widths.size(); ++l) {
    const std::size_t in = spec_.layer_widths[l], out = spec_.layer_widths[l + 1];
    const double bound = std::sqrt(1.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor w = Tensor::matrix(in, out);
    for (double& v : w.values()) v = dist(rng);
    Tensor b = Tensor::matrix(1, out);
    for (double& v : b.values()) v = dist(rng);
    const std::string layer = prefix_ + ".l" + std::to_string(l);
    weights_.push_back(store.add(layer + ".w", std::move(w)));
    biases_.push_back(store.add(layer + ".b", std::move(b)));
  }
}

Var Mlp::forward(Tape& tape, ParamStore& store, Var x) const {
  if (x.value().rank() != 2 || x.value().cols() != spec_.input_width()) {
    throw UsageError(prefix_ + ": expected input width " + std::to_string(spec_.input_width()) +
                     ", got shape " + x.value().shape_string());
  }
  Var h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = linear(h, tape.param(store, weights_[l]), tape.param(store, biases_[l]));
    if (l + 1 < weights_.size()) h = relu(h);
  }
  return h;
}

}  // namespace csr::diffnum
