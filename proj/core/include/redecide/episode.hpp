#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "redecide/array.hpp"
#include "redecide/rng.hpp"

namespace redecide {

// Normalized per-action preference vector from the base policy.
struct AffordanceMap {
  Array values;  // shape {n}, entries >= 0, sum 1 within 1e-9

  static AffordanceMap from(Array values);  // validates
  std::size_t size() const { return values.size(); }
};

enum class MemoryMode { kBinary, kNormalized };

MemoryMode memory_mode_from_string(const std::string& s);
std::string to_string(MemoryMode mode);

// Per-action trial memory m_t. Entries of failed actions are exactly zero;
// everything else keeps its initialization (1 in binary mode, the affordance
// value in normalized mode). Zero marks "tried and failed", so the candidate
// set at any step is {i : values[i] > 0}.
struct FailureMemory {
  MemoryMode mode = MemoryMode::kBinary;
  Array values;

  std::size_t size() const { return values.size(); }
  bool failed(std::size_t action) const { return values[action] == 0.0; }
  std::size_t support_size() const;
};

// Binary mode initializes to all ones; normalized mode copies the affordance
// probability vector (floored at the smallest positive double so that only
// failures are ever exactly zero).
FailureMemory init_memory(MemoryMode mode, std::size_t n,
                          const AffordanceMap* affordance = nullptr);

// Pure update: the failed entry drops to zero, everything else is unchanged.
// Idempotent.
FailureMemory update_memory(FailureMemory m, std::size_t failed_action);

struct AssessmentOutcome {
  bool passed = false;
  // Present only for cost-bearing tasks; +infinity when the action failed.
  std::optional<double> cost;
};

struct EpisodeTrace {
  struct Step {
    std::size_t action;
    AssessmentOutcome outcome;
  };
  std::vector<Step> steps;
  bool succeeded = false;
  std::size_t trials_used = 0;

  // Final-step cost, if the task carries costs.
  std::optional<double> final_cost() const;
};

struct EpisodeConfig {
  std::size_t max_trials = 5;
  MemoryMode memory_mode = MemoryMode::kBinary;
};

// Re-decision policy driven by the episode engine. Policies are pure given
// their weights; per-episode state lives behind begin_episode().
class DecisionPolicy {
 public:
  virtual ~DecisionPolicy() = default;
  virtual std::size_t action_count() const = 0;
  // Called once per episode with the invariant observation.
  virtual void begin_episode(const Array& obs) = 0;
  // Picks an action with positive memory. trial_index counts from 0.
  virtual std::size_t choose(const FailureMemory& memory,
                             std::size_t trial_index, Rng& rng) = 0;
  // Affordance map used to seed normalized memories. Policies without a
  // learned base fall back to the uniform map.
  virtual AffordanceMap affordance() const;
};

using OracleFn = std::function<AssessmentOutcome(std::size_t action)>;

// Runs one invariant-observation episode: the first action comes from the
// policy at trial 0, failures zero the memory, and selection repeats until a
// pass, cfg.max_trials trials, or every action has failed (whichever comes
// first). The oracle is never invoked more than max_trials times, and a
// policy that returns an out-of-range or already-failed action raises
// ProtocolViolationError.
EpisodeTrace run_episode(DecisionPolicy& policy, const Array& observation,
                         std::size_t action_count, const OracleFn& oracle,
                         const EpisodeConfig& cfg, Rng& rng);

}  // namespace redecide
