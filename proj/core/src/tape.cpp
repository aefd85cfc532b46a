#include "redecide/tape.hpp"

#include <cmath>
#include <string>

#include "redecide/errors.hpp"

namespace redecide {

Tape::NodeId Tape::push_leaf(Node n) {
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

Tape::NodeId Tape::push_op(Array value, std::function<void()> back) {
  Node n;
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

Tape::NodeId Tape::param(const Array* value) {
  if (value == nullptr) throw ArgumentError("param leaf requires storage");
  Node n;
  n.ext = value;
  return push_leaf(std::move(n));
}

Tape::NodeId Tape::input(Array value) {
  Node n;
  n.value = std::move(value);
  return push_leaf(std::move(n));
}

Array& Tape::grad_buf(NodeId id) { return nodes_[id].grad; }

const Array& Tape::grad(NodeId id) const {
  if (!ran_backward_) throw ConsistencyError("grad read before backward()");
  return nodes_[id].grad;
}

void Tape::check_same_shape(NodeId a, NodeId b, const char* op) const {
  if (!val(a).same_shape(val(b))) {
    throw DimensionError(std::string(op) + ": operand shapes differ");
  }
}

Tape::NodeId Tape::affine(NodeId x, NodeId w, NodeId b) {
  const Array& xv = val(x);
  const Array& wv = val(w);
  const Array& bv = val(b);
  if (wv.rank() != 2 || xv.rank() != 1 || bv.rank() != 1 ||
      wv.cols() != xv.size() || wv.rows() != bv.size()) {
    throw DimensionError("affine: W must be [out,in] with x [in], b [out]");
  }
  const std::size_t out = wv.rows(), in = wv.cols();
  Array y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = bv[o];
    const double* row = wv.data().data() + o * in;
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * xv[i];
    y[o] = acc;
  }
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x, w, b] {
    const Array& gy = nodes_[id].grad;
    const Array& xv = val(x);
    const Array& wv = val(w);
    Array& gx = grad_buf(x);
    Array& gw = grad_buf(w);
    Array& gb = grad_buf(b);
    const std::size_t out = wv.rows(), in = wv.cols();
    for (std::size_t o = 0; o < out; ++o) {
      const double g = gy[o];
      gb[o] += g;
      const double* row = wv.data().data() + o * in;
      double* gwrow = gw.data().data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gwrow[i] += g * xv[i];
        gx[i] += g * row[i];
      }
    }
  };
  return id;
}

Tape::NodeId Tape::linear(NodeId x, NodeId w) {
  const Array& xv = val(x);
  const Array& wv = val(w);
  if (wv.rank() != 2 || xv.rank() != 1 || wv.cols() != xv.size()) {
    throw DimensionError("linear: W must be [out,in] with x [in]");
  }
  const std::size_t out = wv.rows(), in = wv.cols();
  Array y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double acc = 0.0;
    const double* row = wv.data().data() + o * in;
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * xv[i];
    y[o] = acc;
  }
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x, w] {
    const Array& gy = nodes_[id].grad;
    const Array& xv = val(x);
    const Array& wv = val(w);
    Array& gx = grad_buf(x);
    Array& gw = grad_buf(w);
    const std::size_t out = wv.rows(), in = wv.cols();
    for (std::size_t o = 0; o < out; ++o) {
      const double g = gy[o];
      const double* row = wv.data().data() + o * in;
      double* gwrow = gw.data().data() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gwrow[i] += g * xv[i];
        gx[i] += g * row[i];
      }
    }
  };
  return id;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_same_shape(a, b, "add");
  const Array& av = val(a);
  const Array& bv = val(b);
  Array y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, a, b] {
    const Array& gy = nodes_[id].grad;
    Array& ga = grad_buf(a);
    Array& gb = grad_buf(b);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += gy[i];
      gb[i] += gy[i];
    }
  };
  return id;
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  check_same_shape(a, b, "mul");
  const Array& av = val(a);
  const Array& bv = val(b);
  Array y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, a, b] {
    const Array& gy = nodes_[id].grad;
    const Array& av = val(a);
    const Array& bv = val(b);
    Array& ga = grad_buf(a);
    Array& gb = grad_buf(b);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      ga[i] += gy[i] * bv[i];
      gb[i] += gy[i] * av[i];
    }
  };
  return id;
}

Tape::NodeId Tape::axpb(NodeId x, double a, double b) {
  const Array& xv = val(x);
  Array y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a * xv[i] + b;
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x, a] {
    const Array& gy = nodes_[id].grad;
    Array& gx = grad_buf(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += a * gy[i];
  };
  return id;
}

Tape::NodeId Tape::tanh(NodeId x) {
  const Array& xv = val(x);
  Array y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(xv[i]);
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x] {
    const Array& gy = nodes_[id].grad;
    const Array& yv = nodes_[id].value;
    Array& gx = grad_buf(x);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      gx[i] += gy[i] * (1.0 - yv[i] * yv[i]);
    }
  };
  return id;
}

Tape::NodeId Tape::sigmoid(NodeId x) {
  const Array& xv = val(x);
  Array y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = xv[i];
    y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                    : std::exp(v) / (1.0 + std::exp(v));
  }
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x] {
    const Array& gy = nodes_[id].grad;
    const Array& yv = nodes_[id].value;
    Array& gx = grad_buf(x);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
    }
  };
  return id;
}

Tape::NodeId Tape::relu(NodeId x) {
  const Array& xv = val(x);
  Array y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(xv[i]) < kink_margin_) kink_proximal_ = true;
    y[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  }
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x] {
    const Array& gy = nodes_[id].grad;
    const Array& xv = val(x);
    Array& gx = grad_buf(x);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      if (xv[i] > 0.0) gx[i] += gy[i];
    }
  };
  return id;
}

Tape::NodeId Tape::softmax(NodeId x) {
  const Array& xv = val(x);
  if (xv.size() == 0) throw DimensionError("softmax: empty input");
  double mx = xv[0];
  for (std::size_t i = 1; i < xv.size(); ++i) mx = std::max(mx, xv[i]);
  Array y(xv.shape());
  double sum = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    y[i] = std::exp(xv[i] - mx);
    sum += y[i];
  }
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= sum;
  NodeId id = push_op(std::move(y), {});
  nodes_[id].back = [this, id, x] {
    const Array& gy = nodes_[id].grad;
    const Array& yv = nodes_[id].value;
    Array& gx = grad_buf(x);
    double dot = 0.0;
    for (std::size_t i = 0; i < gy.size(); ++i) dot += gy[i] * yv[i];
    for (std::size_t i = 0; i < gy.size(); ++i) {
      gx[i] += yv[i] * (gy[i] - dot);
    }
  };
  return id;
}

Tape::NodeId Tape::pick(NodeId x, std::size_t index) {
  const Array& xv = val(x);
  if (index >= xv.size()) throw DimensionError("pick: index out of range");
  NodeId id = push_op(Array::scalar(xv[index]), {});
  nodes_[id].back = [this, id, x, index] {
    grad_buf(x)[index] += nodes_[id].grad[0];
  };
  return id;
}

Tape::NodeId Tape::l1_loss(NodeId pred, const Array& target) {
  const Array& pv = val(pred);
  if (!pv.same_shape(target)) throw DimensionError("l1_loss: shape mismatch");
  const std::size_t n = pv.size();
  if (n == 0) throw DimensionError("l1_loss: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pv[i] - target[i];
    if (std::abs(d) < kink_margin_) kink_proximal_ = true;
    acc += std::abs(d);
  }
  NodeId id = push_op(Array::scalar(acc / static_cast<double>(n)), {});
  nodes_[id].back = [this, id, pred, target] {
    const double g = nodes_[id].grad[0] / static_cast<double>(target.size());
    const Array& pv = val(pred);
    Array& gp = grad_buf(pred);
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double d = pv[i] - target[i];
      gp[i] += g * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
    }
  };
  return id;
}

Tape::NodeId Tape::smooth_l1_loss(NodeId pred, const Array& target) {
  const Array& pv = val(pred);
  if (!pv.same_shape(target)) throw DimensionError("smooth_l1_loss: shape mismatch");
  const std::size_t n = pv.size();
  if (n == 0) throw DimensionError("smooth_l1_loss: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pv[i] - target[i];
    const double ad = std::abs(d);
    // C1 but not C2 at |d| = 1; flag probes near the joint as well.
    if (std::abs(ad - 1.0) < kink_margin_) kink_proximal_ = true;
    acc += ad < 1.0 ? 0.5 * d * d : ad - 0.5;
  }
  NodeId id = push_op(Array::scalar(acc / static_cast<double>(n)), {});
  nodes_[id].back = [this, id, pred, target] {
    const double g = nodes_[id].grad[0] / static_cast<double>(target.size());
    const Array& pv = val(pred);
    Array& gp = grad_buf(pred);
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double d = pv[i] - target[i];
      gp[i] += g * (std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0));
    }
  };
  return id;
}

void Tape::backward(NodeId loss) {
  if (loss >= nodes_.size()) throw ArgumentError("backward: unknown node");
  if (val(loss).size() != 1) throw DimensionError("backward: loss must be scalar");
  if (!std::isfinite(val(loss)[0])) throw ProbeError("backward: non-finite loss");
  for (auto& n : nodes_) {
    n.grad = Array(n.ext ? n.ext->shape() : n.value.shape());
  }
  nodes_[loss].grad[0] = 1.0;
  ran_backward_ = true;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back();
  }
}

}  // namespace redecide
