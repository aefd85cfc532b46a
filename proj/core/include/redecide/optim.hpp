#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "redecide/paramset.hpp"

namespace redecide {

enum class OptimizerKind { kSgdMomentum, kAdam };

OptimizerKind optimizer_kind_from_string(const std::string& s);
std::string to_string(OptimizerKind kind);

struct OptimConfig {
  OptimizerKind kind = OptimizerKind::kSgdMomentum;
  double lr = 1e-4;
  // Decoupled weight decay: w -= lr * wd * w, applied to the pre-step value,
  // never folded into the gradient.
  double weight_decay = 0.0;
  double momentum = 0.9;                     // sgd-momentum
  double beta1 = 0.9, beta2 = 0.99;          // adam
  double eps = 1e-8;
};

// Stateful optimizer. Slot buffers (momentum / adam moments) are keyed by
// parameter name and sized lazily on first use. Frozen parameters are never
// read or written; a trainable parameter without a gradient entry is a
// ConsistencyError.
class Optimizer {
 public:
  explicit Optimizer(OptimConfig cfg) : cfg_(cfg) {}

  void step(ParamSet& params, const std::map<std::string, Array>& grads);

  const OptimConfig& config() const { return cfg_; }

 private:
  OptimConfig cfg_;
  std::map<std::string, Array> m_;  // momentum / first moment
  std::map<std::string, Array> v_;  // second moment (adam)
  std::int64_t t_ = 0;
};

// Single-shot form: applies one optimizer step with fresh slot state.
void opt_step(OptimConfig cfg, ParamSet& params,
              const std::map<std::string, Array>& grads);

}  // namespace redecide
