#include "csr/diffnum/param_store.hpp"

#include "csr/error.hpp"

namespace csr::diffnum {

ParamId ParamStore::add(std::string name, Tensor init) {
  if (by_name_.contains(name)) throw UsageError("duplicate parameter name: " + name);
  const std::size_t index = params_.size();
  Tensor zeros(init.shape());
  by_name_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), std::move(init), zeros, zeros, zeros});
  return ParamId{index};
}

std::optional<ParamId> ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return ParamId{it->second};
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

}  // namespace csr::diffnum
