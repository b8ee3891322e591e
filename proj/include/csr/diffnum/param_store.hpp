#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "csr/diffnum/tensor.hpp"

namespace csr::diffnum {

// Index of a parameter inside its ParamStore. Stable for the life of the
// store and preserved by copies.
struct ParamId {
  std::size_t index = 0;
  friend bool operator==(ParamId, ParamId) = default;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;
};

// Flat store of named trainable tensors with gradient accumulators and Adam
// moments.
class ParamStore {
 public:
  ParamId add(std::string name, Tensor init);

  Parameter& operator[](ParamId id) { return params_[id.index]; }
  const Parameter& operator[](ParamId id) const { return params_[id.index]; }
  std::optional<ParamId> find(const std::string& name) const;

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }

  // Total trainable scalars, biases included.
  std::size_t scalar_count() const;

  void zero_grad();
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::uint64_t step_ = 0;
};

}  // namespace csr::diffnum
