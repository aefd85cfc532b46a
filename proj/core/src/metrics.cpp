#include "redecide/metrics.hpp"

#include <cmath>
#include <thread>

#include "redecide/errors.hpp"

namespace redecide {

WilsonInterval wilson(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw ArgumentError("wilson: needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

MetricsReport compute_metrics(const std::vector<EpisodeTrace>& traces) {
  if (traces.empty()) throw ArgumentError("compute_metrics: empty trace list");
  MetricsReport r;
  r.episodes = traces.size();
  double trials_sum = 0.0;
  double trials_sq = 0.0;
  bool any_cost = false;
  double recip_sum = 0.0;
  for (const auto& trace : traces) {
    if (trace.succeeded) {
      ++r.successes;
      trials_sum += static_cast<double>(trace.trials_used);
      trials_sq += static_cast<double>(trace.trials_used) *
                   static_cast<double>(trace.trials_used);
    }
    const auto cost = trace.final_cost();
    if (cost.has_value()) {
      any_cost = true;
      if (trace.succeeded && std::isfinite(*cost) && *cost > 0.0) {
        recip_sum += 100.0 / *cost;
      }
      // failures contribute 0
    }
  }
  r.tsr = static_cast<double>(r.successes) / static_cast<double>(r.episodes);
  r.tsr_ci = wilson(r.successes, r.episodes);
  if (r.successes > 0) {
    const double k = static_cast<double>(r.successes);
    const double mean = trials_sum / k;
    r.tns = mean;
    const double var = std::max(0.0, trials_sq / k - mean * mean);
    const double half = 1.959963984540054 * std::sqrt(var / k);
    r.tns_ci = WilsonInterval{mean - half, mean + half};
  }
  if (any_cost) {
    r.pc_recip = recip_sum / static_cast<double>(r.episodes);
  }
  return r;
}

MetricsReport evaluate_policy(const PolicyFactory& factory, const TaskSpec& task,
                              std::size_t episodes, std::uint64_t seed,
                              const EvalConfig& cfg) {
  if (episodes == 0) throw ArgumentError("evaluate_policy: needs episodes >= 1");
  std::vector<EpisodeTrace> traces(episodes);

  EpisodeConfig episode_cfg;
  episode_cfg.max_trials = cfg.max_trials;
  episode_cfg.memory_mode = task.memory_mode;

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    auto policy = factory();
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = Rng::stream(seed, i);
      TaskInstance inst = generate(task, rng);
      traces[i] = run_episode(*policy, inst, task.assess_cfg, episode_cfg, rng);
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(cfg.threads, episodes));
  if (workers == 1) {
    run_range(0, episodes);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (episodes + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(lo + chunk, episodes);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return compute_metrics(traces);
}

std::vector<SuiteRow> run_suite(const std::vector<std::string>& policies,
                                const std::vector<TaskSpec>& tasks,
                                std::size_t episodes_per_cell,
                                const std::vector<std::uint64_t>& seeds,
                                const EvalConfig& cfg,
                                const SuitePolicyProvider& provider) {
  if (policies.empty() || tasks.empty() || seeds.empty()) {
    throw ArgumentError("run_suite: empty policy, task, or seed list");
  }
  std::vector<SuiteRow> rows;
  rows.reserve(policies.size() * tasks.size() * seeds.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    for (const auto& name : policies) {
      for (std::uint64_t seed : seeds) {
        PolicyFactory factory = provider(name, tasks[ti], ti, seed);
        SuiteRow row;
        row.policy = name;
        row.task_index = ti;
        row.seed = seed;
        row.metrics =
            evaluate_policy(factory, tasks[ti], episodes_per_cell, seed, cfg);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace redecide
