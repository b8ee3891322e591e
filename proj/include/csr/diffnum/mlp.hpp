#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "csr/diffnum/param_store.hpp"
#include "csr/diffnum/tape.hpp"

namespace csr::diffnum {

// Layer widths of a fully connected network, input first. Every layer has a
// bias; ReLU follows every layer but the last.
struct MlpSpec {
  std::vector<std::size_t> layer_widths;

  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t output_width() const { return layer_widths.back(); }
  // sum_i (w_i * w_{i+1} + w_{i+1})
  std::size_t parameter_count() const;
  void validate() const;
};

// An MlpSpec bound to its weights in a ParamStore. Parameters are named
// "<prefix>.l<k>.w" ([in, out]) and "<prefix>.l<k>.b" ([1, out]).
class Mlp {
 public:
  Mlp() = default;
  // Registers the parameters, initialized uniform in +-sqrt(1/fan_in).
  Mlp(ParamStore& store, std::string prefix, MlpSpec spec, std::mt19937_64& rng);

  const MlpSpec& spec() const { return spec_; }
  const std::string& prefix() const { return prefix_; }
  const std::vector<ParamId>& weights() const { return weights_; }
  const std::vector<ParamId>& biases() const { return biases_; }

  // x [batch, input_width] -> [batch, output_width]
  Var forward(Tape& tape, ParamStore& store, Var x) const;

 private:
  MlpSpec spec_;
  std::string prefix_;
  std::vector<ParamId> weights_;
  std::vector<ParamId> biases_;
};

}  // namespace csr::diffnum
