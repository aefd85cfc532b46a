#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "redecide/array.hpp"

namespace redecide {

// Reverse-mode gradient tape over Array values. One tape records one forward
// build; backward() replays the recorded rules in reverse. Tapes are cheap,
// single-use and confined to one thread.
//
// `param` leaves reference caller-owned storage (which must outlive the
// tape), so binding a ParamSet does not copy weights. `input` leaves own a
// copy and exist for observations, memories and other per-call data.
class Tape {
 public:
  using NodeId = std::size_t;

  NodeId param(const Array* value);
  NodeId input(Array value);

  // Primitives. Every op validates shapes and registers its backward rule.
  NodeId affine(NodeId x, NodeId w, NodeId b);  // W*x + b with W: [out, in]
  NodeId linear(NodeId x, NodeId w);            // W*x
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId axpb(NodeId x, double a, double b);  // a*x + b, elementwise
  NodeId tanh(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId relu(NodeId x);
  NodeId softmax(NodeId x);
  NodeId pick(NodeId x, std::size_t index);  // single element, shape {1}
  NodeId l1_loss(NodeId pred, const Array& target);         // mean |d|
  NodeId smooth_l1_loss(NodeId pred, const Array& target);  // Huber, delta=1

  const Array& value(NodeId id) const { return val(id); }
  const Array& grad(NodeId id) const;

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every node.
  // `loss` must be a scalar (size 1) with a finite value.
  void backward(NodeId loss);

  // True when a relu / l1 / smooth-l1 input landed within `kink_margin` of a
  // non-smooth point during the forward build. Finite-difference probes at
  // such points are meaningless; grad_check rejects them.
  bool kink_proximal() const { return kink_proximal_; }
  void set_kink_margin(double m) { kink_margin_ = m; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Array value;               // owned value for computed nodes and inputs
    const Array* ext = nullptr;  // external storage for param leaves
    Array grad;
    std::function<void()> back;  // empty for leaves
  };

  const Array& val(NodeId id) const {
    const Node& n = nodes_[id];
    return n.ext ? *n.ext : n.value;
  }
  Array& grad_buf(NodeId id);
  NodeId push_leaf(Node n);
  NodeId push_op(Array value, std::function<void()> back);
  void check_same_shape(NodeId a, NodeId b, const char* op) const;

  std::vector<Node> nodes_;
  double kink_margin_ = 1e-6;
  bool kink_proximal_ = false;
  bool ran_backward_ = false;
};

}  // namespace redecide
