#include "redecide/optim.hpp"

#include <cmath>

#include "redecide/errors.hpp"

namespace redecide {

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd-momentum") return OptimizerKind::kSgdMomentum;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ArgumentError("unknown optimizer kind: " + s);
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgdMomentum ? "sgd-momentum" : "adam";
}

void Optimizer::step(ParamSet& params, const std::map<std::string, Array>& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& [name, entry] : params) {
    if (!entry.trainable) continue;
    auto git = grads.find(name);
    if (git == grads.end()) {
      throw ConsistencyError("missing gradient for trainable parameter: " + name);
    }
    const Array& g = git->second;
    Array& w = entry.value;
    if (!g.same_shape(w)) {
      throw DimensionError("gradient shape mismatch for parameter: " + name);
    }
    auto& m = m_.try_emplace(name, Array(w.shape())).first->second;
    if (cfg_.kind == OptimizerKind::kSgdMomentum) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = cfg_.momentum * m[i] + g[i];
        w[i] -= cfg_.lr * m[i] + cfg_.lr * cfg_.weight_decay * w[i];
      }
    } else {
      auto& v = v_.try_emplace(name, Array(w.shape())).first->second;
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps) +
                cfg_.lr * cfg_.weight_decay * w[i];
      }
    }
  }
}

void opt_step(OptimConfig cfg, ParamSet& params,
              const std::map<std::string, Array>& grads) {
  Optimizer opt(cfg);
  opt.step(params, grads);
}

}  // namespace redecide
