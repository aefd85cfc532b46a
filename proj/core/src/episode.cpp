#include "redecide/episode.hpp"

#include <cmath>
#include <limits>

#include "redecide/errors.hpp"

namespace redecide {

AffordanceMap AffordanceMap::from(Array values) {
  if (values.size() == 0) throw DimensionError("affordance map must be non-empty");
  double sum = 0.0;
  for (double v : values.data()) {
    if (!(v >= 0.0)) throw ArgumentError("affordance entries must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ArgumentError("affordance map must sum to 1 within 1e-9");
  }
  return AffordanceMap{std::move(values)};
}

MemoryMode memory_mode_from_string(const std::string& s) {
  if (s == "binary") return MemoryMode::kBinary;
  if (s == "normalized") return MemoryMode::kNormalized;
  throw ArgumentError("unknown memory mode: " + s);
}

std::string to_string(MemoryMode mode) {
  return mode == MemoryMode::kBinary ? "binary" : "normalized";
}

std::size_t FailureMemory::support_size() const {
  std::size_t n = 0;
  for (double v : values.data()) {
    if (v > 0.0) ++n;
  }
  return n;
}

FailureMemory init_memory(MemoryMode mode, std::size_t n,
                          const AffordanceMap* affordance) {
  if (n == 0) throw ArgumentError("init_memory: action set must be non-empty");
  FailureMemory m;
  m.mode = mode;
  if (mode == MemoryMode::kBinary) {
    m.values = Array::ones({n});
  } else {
    if (affordance == nullptr) {
      throw ArgumentError("init_memory: normalized mode requires an affordance map");
    }
    if (affordance->size() != n) {
      throw DimensionError("init_memory: affordance size does not match action set");
    }
    m.values = affordance->values;
    // Only failures may be exactly zero.
    for (double& v : m.values.data()) {
      v = std::max(v, std::numeric_limits<double>::min());
    }
  }
  return m;
}

FailureMemory update_memory(FailureMemory m, std::size_t failed_action) {
  if (failed_action >= m.size()) {
    throw ArgumentError("update_memory: action index out of range");
  }
  m.values[failed_action] = 0.0;
  return m;
}

std::optional<double> EpisodeTrace::final_cost() const {
  if (steps.empty()) return std::nullopt;
  return steps.back().outcome.cost;
}

AffordanceMap DecisionPolicy::affordance() const {
  const std::size_t n = action_count();
  return AffordanceMap{Array::full({n}, 1.0 / static_cast<double>(n))};
}

EpisodeTrace run_episode(DecisionPolicy& policy, const Array& observation,
                         std::size_t action_count, const OracleFn& oracle,
                         const EpisodeConfig& cfg, Rng& rng) {
  if (action_count == 0) throw ArgumentError("run_episode: empty action set");
  if (cfg.max_trials == 0) throw ArgumentError("run_episode: max_trials must be >= 1");
  if (policy.action_count() != action_count) {
    throw ArgumentError("run_episode: policy and task disagree on action count");
  }

  policy.begin_episode(observation);
  AffordanceMap aff;
  if (cfg.memory_mode == MemoryMode::kNormalized) aff = policy.affordance();
  FailureMemory memory = init_memory(
      cfg.memory_mode, action_count,
      cfg.memory_mode == MemoryMode::kNormalized ? &aff : nullptr);

  EpisodeTrace trace;
  for (std::size_t t = 0; t < cfg.max_trials; ++t) {
    if (memory.support_size() == 0) break;  // every action already failed
    const std::size_t action = policy.choose(memory, t, rng);
    if (action >= action_count) {
      throw ProtocolViolationError("policy returned out-of-range action");
    }
    if (memory.failed(action)) {
      throw ProtocolViolationError("policy repeated a failed action");
    }
    AssessmentOutcome outcome = oracle(action);
    trace.steps.push_back({action, outcome});
    if (outcome.passed) {
      trace.succeeded = true;
      break;
    }
    memory = update_memory(std::move(memory), action);
  }
  trace.trials_used = trace.steps.size();
  return trace;
}

}  // namespace redecide
