#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redecide/episode.hpp"
#include "redecide/tasks.hpp"

namespace redecide {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double p) const { return p >= lo && p <= hi; }
};

// Wilson score interval for a binomial proportion (z defaults to 95%).
WilsonInterval wilson(std::size_t successes, std::size_t trials,
                      double z = 1.959963984540054);

struct MetricsReport {
  std::size_t episodes = 0;
  std::size_t successes = 0;
  double tsr = 0.0;  // successes / episodes
  WilsonInterval tsr_ci;
  // Mean trials over successful episodes; absent when nothing succeeded.
  std::optional<double> tns;
  std::optional<WilsonInterval> tns_ci;  // normal approximation
  // Mean of 100/final-cost over all episodes, failures contributing 0;
  // absent for tasks without costs.
  std::optional<double> pc_recip;
};

// Reduces traces to the three headline metrics. Permutation invariant;
// throws ArgumentError on an empty list.
MetricsReport compute_metrics(const std::vector<EpisodeTrace>& traces);

struct EvalConfig {
  std::size_t max_trials = 5;
  std::size_t threads = 1;
};

// Policies carry per-episode state, so parallel evaluation constructs one
// instance per worker through a factory.
using PolicyFactory = std::function<std::unique_ptr<DecisionPolicy>()>;

// Evaluates `episodes` seeded episodes. Episode i derives its own stream
// from (seed, i) and generates its instance before any policy randomness, so
// different policies evaluated at the same (task, seed) see identical
// instances, and the result does not depend on the thread count.
MetricsReport evaluate_policy(const PolicyFactory& factory, const TaskSpec& task,
                              std::size_t episodes, std::uint64_t seed,
                              const EvalConfig& cfg);

struct SuiteRow {
  std::string policy;
  std::size_t task_index = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

using SuitePolicyProvider = std::function<PolicyFactory(
    const std::string& policy, const TaskSpec& task, std::size_t task_index,
    std::uint64_t seed)>;

// Full evaluation grid: policies x tasks x seeds, one row each, deterministic
// given the seeds.
std::vector<SuiteRow> run_suite(const std::vector<std::string>& policies,
                                const std::vector<TaskSpec>& tasks,
                                std::size_t episodes_per_cell,
                                const std::vector<std::uint64_t>& seeds,
                                const EvalConfig& cfg,
                                const SuitePolicyProvider& provider);

}  // namespace redecide
