#include "redecide/layers.hpp"

#include <cmath>

#include "redecide/errors.hpp"

namespace redecide {

GruNodeIds bind_gru(Tape& t, const ParamSet& params) {
  GruNodeIds g;
  g.wz = t.param(&params.at("wz"));
  g.uz = t.param(&params.at("uz"));
  g.bz = t.param(&params.at("bz"));
  g.wr = t.param(&params.at("wr"));
  g.ur = t.param(&params.at("ur"));
  g.br = t.param(&params.at("br"));
  g.wh = t.param(&params.at("wh"));
  g.uh = t.param(&params.at("uh"));
  g.bh = t.param(&params.at("bh"));
  return g;
}

Tape::NodeId gru_cell_node(Tape& t, Tape::NodeId x, Tape::NodeId h,
                           const GruNodeIds& g) {
  auto z = t.sigmoid(t.add(t.affine(x, g.wz, g.bz), t.linear(h, g.uz)));
  auto r = t.sigmoid(t.add(t.affine(x, g.wr, g.br), t.linear(h, g.ur)));
  auto hcand = t.tanh(t.add(t.affine(x, g.wh, g.bh), t.linear(t.mul(r, h), g.uh)));
  return t.add(t.mul(t.axpb(z, -1.0, 1.0), h), t.mul(z, hcand));
}

Array affine(const Array& x, const Array& w, const Array& b) {
  Tape t;
  auto y = t.affine(t.param(&x), t.param(&w), t.param(&b));
  return t.value(y);
}

Array gru_cell(const Array& x, const Array& h, const ParamSet& params) {
  if (!x.same_shape(h)) throw DimensionError("gru_cell: x and h widths differ");
  Tape t;
  auto g = bind_gru(t, params);
  auto out = gru_cell_node(t, t.param(&x), t.param(&h), g);
  return t.value(out);
}

Array softmax(const Array& v) {
  Tape t;
  return t.value(t.softmax(t.param(&v)));
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "l1") return LossKind::kL1;
  if (s == "smooth-l1") return LossKind::kSmoothL1;
  throw ArgumentError("unknown loss kind: " + s);
}

std::string to_string(LossKind kind) {
  return kind == LossKind::kL1 ? "l1" : "smooth-l1";
}

double loss(LossKind kind, const Array& pred, const Array& target) {
  Tape t;
  return t.value(loss_node(t, kind, t.param(&pred), target))[0];
}

Tape::NodeId loss_node(Tape& t, LossKind kind, Tape::NodeId pred,
                       const Array& target) {
  return kind == LossKind::kL1 ? t.l1_loss(pred, target)
                               : t.smooth_l1_loss(pred, target);
}

Array xavier_matrix(std::size_t out, std::size_t in, Rng& rng) {
  Array w({out, in});
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (auto& v : w.data()) v = rng.uniform(-limit, limit);
  return w;
}

ParamSet make_gru_params(std::size_t width, Rng& rng) {
  ParamSet p;
  for (const char* name : {"wz", "uz", "wr", "ur", "wh", "uh"}) {
    p.add(name, xavier_matrix(width, width, rng));
  }
  for (const char* name : {"bz", "br", "bh"}) {
    p.add(name, Array::zeros({width}));
  }
  return p;
}

}  // namespace redecide
