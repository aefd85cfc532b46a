#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "redecide/array.hpp"
#include "redecide/errors.hpp"
#include "redecide/gradcheck.hpp"
#include "redecide/layers.hpp"
#include "redecide/optim.hpp"
#include "redecide/paramset.hpp"
#include "redecide/rng.hpp"
#include "redecide/tape.hpp"

using namespace redecide;

namespace {

Array random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  Array v({n});
  for (auto& x : v.data()) x = scale * rng.normal();
  return v;
}

bool bitwise_equal(const Array& a, const Array& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("array shape invariant") {
  CHECK_THROWS_AS(Array({2, 3}, {1.0, 2.0}), DimensionError);
  Array a({2, 2}, {1, 2, 3, 4});
  CHECK(a.at2(1, 0) == 3.0);
  CHECK(Array::identity(3).at2(2, 2) == 1.0);
  CHECK(Array::identity(3).at2(0, 1) == 0.0);
}

TEST_CASE("rng determinism and stream independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s1 = Rng::stream(7, 0);
  Rng s2 = Rng::stream(7, 1);
  CHECK(s1.next_u64() != s2.next_u64());

  Rng c(99);
  for (int i = 0; i < 1000; ++i) {
    double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  // below() stays in range and hits every residue eventually
  Rng d(5);
  bool seen[7] = {};
  for (int i = 0; i < 1000; ++i) seen[d.below(7)] = true;
  for (bool s : seen) CHECK(s);
  CHECK_THROWS_AS(d.below(0), ArgumentError);
}

TEST_CASE("affine identity and hand arithmetic") {
  Array x = Array::vec({1, 2});
  Array w = Array::identity(2);
  Array b = Array::zeros({2});
  Array y = affine(x, w, b);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(2.0));

  Array x2 = Array::vec({1, -1});
  Array w2({2, 2}, {2, 0, 0, 3});
  Array b2 = Array::vec({1, 1});
  Array y2 = affine(x2, w2, b2);
  CHECK(y2[0] == doctest::Approx(3.0));
  CHECK(y2[1] == doctest::Approx(-2.0));

  CHECK_THROWS_AS(affine(Array::vec({1, 2, 3}), w, b), DimensionError);
}

TEST_CASE("affine gradient matches central differences") {
  Rng rng(11);
  ParamSet p;
  p.add("w", xavier_matrix(3, 4, rng));
  p.add("b", random_vec(3, rng));
  Array x = random_vec(4, rng);
  Array target = random_vec(3, rng);
  auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    auto y = t.affine(t.input(x), ids.at("w"), ids.at("b"));
    return t.smooth_l1_loss(y, target);
  };
  auto report = grad_check(graph, p, 1e-5, 1e-6);
  CHECK(!report.rejected);
  CHECK(report.passed);
}

TEST_CASE("gru zero-weight analytic case") {
  ParamSet p;
  for (const char* n : {"wz", "uz", "wr", "ur", "wh", "uh"}) {
    p.add(n, Array::zeros({2, 2}));
  }
  for (const char* n : {"bz", "br", "bh"}) p.add(n, Array::zeros({2}));

  // z = 0.5, hcand = 0, so h' = 0.5 h
  Array h = Array::vec({1, 0});
  Array x = Array::zeros({2});
  Array out = gru_cell(x, h, p);
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(0.0));

  // fixed point at the origin for any weights with zero bias
  Rng rng(3);
  ParamSet q = make_gru_params(2, rng);
  Array zero = Array::zeros({2});
  Array fixed = gru_cell(zero, zero, q);
  CHECK(fixed[0] == doctest::Approx(0.0));
  CHECK(fixed[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(gru_cell(Array::zeros({3}), h, p), DimensionError);
}

TEST_CASE("gru gradients match central differences for all nine blocks") {
  Rng rng(17);
  ParamSet p = make_gru_params(3, rng);
  for (const char* n : {"bz", "br", "bh"}) {
    p.at(n) = random_vec(3, rng, 0.3);
  }
  Array x = random_vec(3, rng);
  Array h0 = random_vec(3, rng, 0.5);
  Array target = random_vec(3, rng, 0.3);
  auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    GruNodeIds g{ids.at("wz"), ids.at("uz"), ids.at("bz"),
                 ids.at("wr"), ids.at("ur"), ids.at("br"),
                 ids.at("wh"), ids.at("uh"), ids.at("bh")};
    auto out = gru_cell_node(t, t.input(x), t.input(h0), g);
    return t.smooth_l1_loss(out, target);
  };
  auto report = grad_check(graph, p, 1e-5, 1e-4);
  CHECK(!report.rejected);
  CHECK(report.passed);
  CHECK(report.per_param.size() == 9);
}

TEST_CASE("softmax contract") {
  Array s = softmax(Array::vec({0, 0}));
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));

  Array sat = softmax(Array::vec({100, 0}));
  CHECK(std::abs(sat[0] - 1.0) < 1e-12);
  CHECK(sat[1] < 1e-12);

  CHECK_THROWS_AS(softmax(Array({0})), DimensionError);

  // shift invariance and probability-vector property at random points
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.below(8);
    Array v = random_vec(n, rng, 10.0);
    double c = rng.normal() * 50.0;
    Array shifted = v;
    for (auto& x : shifted.data()) x += c;
    Array a = softmax(v), b = softmax(shifted);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(a[i] - b[i]) < 1e-12);
      CHECK(a[i] >= 0.0);
      sum += a[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("loss branch values") {
  Array zero = Array::vec({0.0});
  CHECK(loss(LossKind::kSmoothL1, Array::vec({0.5}), zero) == doctest::Approx(0.125));
  CHECK(loss(LossKind::kSmoothL1, Array::vec({2.0}), zero) == doctest::Approx(1.5));
  CHECK(loss(LossKind::kL1, Array::vec({-3.0}), zero) == doctest::Approx(3.0));
  CHECK_THROWS_AS(loss(LossKind::kL1, Array::vec({1, 2}), zero), DimensionError);
  // mean reduction
  CHECK(loss(LossKind::kL1, Array::vec({1, 3}), Array::vec({0, 0})) ==
        doctest::Approx(2.0));
}

TEST_CASE("sgd-momentum hand recursion") {
  ParamSet p;
  p.add("w", Array::vec({0.0}));
  OptimConfig cfg;
  cfg.kind = OptimizerKind::kSgdMomentum;
  cfg.lr = 0.1;
  cfg.momentum = 0.9;
  cfg.weight_decay = 0.0;
  Optimizer opt(cfg);
  std::map<std::string, Array> grads{{"w", Array::vec({1.0})}};
  opt.step(p, grads);
  CHECK(p.at("w")[0] == doctest::Approx(-0.1));
  opt.step(p, grads);
  CHECK(p.at("w")[0] == doctest::Approx(-0.29));
}

TEST_CASE("frozen parameters are bitwise untouched") {
  Rng rng(5);
  ParamSet p;
  p.add("frozen", random_vec(8, rng), /*trainable=*/false);
  p.add("live", random_vec(8, rng));
  Array before = p.at("frozen");
  std::map<std::string, Array> grads{{"frozen", Array::ones({8})},
                                     {"live", Array::ones({8})}};
  for (auto kind : {OptimizerKind::kSgdMomentum, OptimizerKind::kAdam}) {
    OptimConfig cfg;
    cfg.kind = kind;
    cfg.lr = 0.5;
    cfg.weight_decay = 0.1;
    Optimizer opt(cfg);
    opt.step(p, grads);
    CHECK(bitwise_equal(p.at("frozen"), before));
  }
}

TEST_CASE("adam first step magnitude is lr for large gradients") {
  ParamSet p;
  p.add("w", Array::vec({0.0, 0.0}));
  OptimConfig cfg;
  cfg.kind = OptimizerKind::kAdam;
  cfg.lr = 1e-3;
  Optimizer opt(cfg);
  std::map<std::string, Array> grads{{"w", Array::vec({10.0, -2.0})}};
  opt.step(p, grads);
  CHECK(std::abs(p.at("w")[0] + cfg.lr) < 1e-6 * cfg.lr + 1e-12);
  CHECK(std::abs(p.at("w")[1] - cfg.lr) < 1e-6 * cfg.lr + 1e-12);
}

TEST_CASE("missing gradient for trainable parameter is a consistency error") {
  ParamSet p;
  p.add("w", Array::vec({1.0}));
  Optimizer opt(OptimConfig{});
  std::map<std::string, Array> empty;
  CHECK_THROWS_AS(opt.step(p, empty), ConsistencyError);
}

TEST_CASE("grad_check two-layer net passes at 1e-5") {
  Rng rng(31);
  ParamSet p;
  p.add("w1", xavier_matrix(6, 4, rng));
  p.add("b1", random_vec(6, rng, 0.2));
  p.add("w2", xavier_matrix(3, 6, rng));
  p.add("b2", random_vec(3, rng, 0.2));
  Array x = random_vec(4, rng);
  Array target = random_vec(3, rng, 0.5);
  auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    auto h = t.tanh(t.affine(t.input(x), ids.at("w1"), ids.at("b1")));
    auto y = t.affine(h, ids.at("w2"), ids.at("b2"));
    return t.smooth_l1_loss(y, target);
  };
  auto report = grad_check(graph, p, 1e-5, 1e-5);
  CHECK(!report.rejected);
  CHECK(report.passed);
}

TEST_CASE("grad_check gru unrolled three steps passes at 1e-4") {
  Rng rng(37);
  ParamSet p = make_gru_params(3, rng);
  Array x1 = random_vec(3, rng), x2 = random_vec(3, rng), x3 = random_vec(3, rng);
  Array target = random_vec(3, rng, 0.3);
  auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    GruNodeIds g{ids.at("wz"), ids.at("uz"), ids.at("bz"),
                 ids.at("wr"), ids.at("ur"), ids.at("br"),
                 ids.at("wh"), ids.at("uh"), ids.at("bh")};
    auto h = t.input(Array::zeros({3}));
    h = gru_cell_node(t, t.input(x1), h, g);
    h = gru_cell_node(t, t.input(x2), h, g);
    h = gru_cell_node(t, t.input(x3), h, g);
    return t.smooth_l1_loss(h, target);
  };
  auto report = grad_check(graph, p, 1e-5, 1e-4);
  CHECK(!report.rejected);
  CHECK(report.passed);
}

TEST_CASE("grad_check rejects a probe at a relu kink") {
  ParamSet p;
  p.add("w", Array::vec({0.0}));  // relu input exactly at the kink
  auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    auto y = t.relu(ids.at("w"));
    return t.l1_loss(y, Array::vec({1.0}));
  };
  auto report = grad_check(graph, p, 1e-5, 1e-4);
  CHECK(report.rejected);
  CHECK(!report.passed);
}

TEST_CASE("softmax head and picked-q gradients match finite differences") {
  Rng rng(41);
  ParamSet p;
  p.add("w", xavier_matrix(5, 4, rng));
  p.add("b", random_vec(5, rng, 0.1));
  Array x = random_vec(4, rng);
  Array target({5});
  target[2] = 1.0;
  auto softmax_graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    auto probs = t.softmax(t.affine(t.input(x), ids.at("w"), ids.at("b")));
    return t.smooth_l1_loss(probs, target);
  };
  CHECK(grad_check(softmax_graph, p, 1e-5, 1e-5).passed);

  auto pick_graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
    auto q = t.affine(t.input(x), ids.at("w"), ids.at("b"));
    return t.smooth_l1_loss(t.pick(q, 3), Array::vec({0.7}));
  };
  CHECK(grad_check(pick_graph, p, 1e-5, 1e-5).passed);
}

TEST_CASE("randomized gradient sweep over layer zoo") {
  Rng rng(53);
  int checked = 0;
  for (int probe = 0; probe < 50; ++probe) {
    ParamSet p;
    p.add("w1", xavier_matrix(5, 3, rng));
    p.add("b1", random_vec(5, rng, 0.3));
    p.add("w2", xavier_matrix(4, 5, rng));
    p.add("b2", random_vec(4, rng, 0.3));
    Array x = random_vec(3, rng);
    Array target = random_vec(4, rng, 0.4);
    LossKind kind = probe % 2 == 0 ? LossKind::kL1 : LossKind::kSmoothL1;
    auto graph = [&](Tape& t, const std::map<std::string, Tape::NodeId>& ids) {
      auto h = t.relu(t.affine(t.input(x), ids.at("w1"), ids.at("b1")));
      auto y = t.softmax(t.affine(h, ids.at("w2"), ids.at("b2")));
      return loss_node(t, kind, y, target);
    };
    auto report = grad_check(graph, p, 1e-5, 1e-4);
    if (report.rejected) continue;
    CHECK(report.passed);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("tape shape errors") {
  Tape t;
  auto a = t.input(Array::vec({1, 2}));
  auto b = t.input(Array::vec({1, 2, 3}));
  CHECK_THROWS_AS(t.add(a, b), DimensionError);
  CHECK_THROWS_AS(t.mul(a, b), DimensionError);
  CHECK_THROWS_AS(t.pick(a, 5), DimensionError);
}
