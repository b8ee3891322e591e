#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "csr/diffnum/param_store.hpp"
#include "csr/diffnum/tensor.hpp"

namespace csr::diffnum {

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

// Linear record of tensor operations for reverse-mode differentiation.
//
// Nodes are appended in evaluation order, so reverse index order is a valid
// topological order for the backward sweep. A tape built with
// `record_gradients = false` still evaluates everything but stores no
// backward closures and ignores parameter gradients (inference mode).
class Tape {
 public:
  // Called during backward with the node's own index; reads grad(self) and
  // accumulates into the gradients of the node's inputs.
  using Backprop = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf bound to a store entry. Repeated calls for the same parameter return
  // the same node.
  Var param(ParamStore& store, ParamId id);

  // Seeds d(loss)/d(loss) = 1, sweeps the tape backwards and accumulates
  // into the ParamStore gradients of every parameter the loss depends on.
  void backward(Var loss);

  bool recording() const { return record_; }
  std::size_t node_count() const { return nodes_.size(); }

  // Hash of every ReLU on/off decision made on this tape. Gradient checks
  // compare it across perturbations to spot steps that straddle a kink.
  std::uint64_t activation_signature() const { return signature_; }
  void note_activation(bool on) { signature_ = (signature_ ^ (on ? 0x9eULL : 0x35ULL)) * 0x100000001b3ULL; }

  // --- op implementation surface ---------------------------------------
  Var push(Tensor value, const std::vector<Var>& inputs, Backprop backprop);
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool requires_grad(Var v) const { return requires_grad(v.id); }
  // Gradient accumulator of a node, zero-allocated on first access.
  Tensor& grad(std::size_t id);

 private:
  std::uint64_t signature_ = 0xcbf29ce484222325ULL;

  struct Node {
    Tensor value;
    Tensor grad;
    bool grad_ready = false;
    bool requires_grad = false;
    Backprop backprop;
    ParamStore* store = nullptr;
    ParamId pid;
  };

  std::deque<Node> nodes_;
  std::map<std::pair<const ParamStore*, std::size_t>, std::size_t> param_nodes_;
  bool record_;
};

}  // namespace csr::diffnum
