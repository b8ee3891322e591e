#include "csr/diffnum/tape.hpp"

#include "csr/error.hpp"
#include "csr/kernels.hpp"

namespace csr::diffnum {

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Tape::param(ParamStore& store, ParamId id) {
  const auto key = std::make_pair(static_cast<const ParamStore*>(&store), id.index);
  if (auto it = param_nodes_.find(key); it != param_nodes_.end()) {
    return Var{this, it->second};
  }
  Node n;
  n.value = store[id].value;
  n.requires_grad = record_;
  n.store = &store;
  n.pid = id;
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(key, nodes_.size() - 1);
  return Var{this, nodes_.size() - 1};
}

Var Tape::push(Tensor value, const std::vector<Var>& inputs, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (const Var& in : inputs) {
      if (in.tape != this) throw UsageError("operation mixes variables from different tapes");
      n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
    }
    if (n.requires_grad) n.backprop = std::move(backprop);
  }
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.grad_ready) {
    n.grad = Tensor(n.value.shape());
    n.grad_ready = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw UsageError("backward called with a variable from another tape");
  if (!record_) throw UsageError("backward on a tape built without gradient recording");
  if (nodes_[loss.id].value.size() != 1) {
    throw UsageError("backward needs a scalar loss, got shape " +
                     nodes_[loss.id].value.shape_string());
  }
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss.id)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.grad_ready || !n.requires_grad) continue;
    if (n.backprop) n.backprop(*this, i);
  }
  const auto& k = kernels::active();
  for (const auto& [key, index] : param_nodes_) {
    Node& n = nodes_[index];
    if (!n.grad_ready) continue;
    Tensor& g = (*n.store)[n.pid].grad;
    k.axpy(1.0, n.grad.data(), g.data(), g.size());
  }
}

}  // namespace csr::diffnum
