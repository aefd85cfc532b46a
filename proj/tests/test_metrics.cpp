#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "redecide/errors.hpp"
#include "redecide/metrics.hpp"
#include "redecide/policy.hpp"
#include "redecide/tasks.hpp"

using namespace redecide;

namespace {

EpisodeTrace trace_success_at(std::size_t trial,
                              std::optional<double> cost = std::nullopt) {
  EpisodeTrace t;
  for (std::size_t i = 0; i + 1 < trial; ++i) {
    t.steps.push_back({i, AssessmentOutcome{false, std::nullopt}});
  }
  t.steps.push_back({trial - 1, AssessmentOutcome{true, cost}});
  t.succeeded = true;
  t.trials_used = trial;
  return t;
}

EpisodeTrace trace_failure(std::size_t trials,
                           std::optional<double> cost = std::nullopt) {
  EpisodeTrace t;
  for (std::size_t i = 0; i < trials; ++i) {
    t.steps.push_back({i, AssessmentOutcome{false, cost}});
  }
  t.succeeded = false;
  t.trials_used = trials;
  return t;
}

}  // namespace

TEST_CASE("metric fixtures from the definitions") {
  auto report = compute_metrics(
      {trace_success_at(1), trace_success_at(3), trace_failure(5)});
  CHECK(report.episodes == 3);
  CHECK(report.tsr == doctest::Approx(2.0 / 3.0));
  REQUIRE(report.tns.has_value());
  CHECK(*report.tns == doctest::Approx(2.0));
  CHECK(!report.pc_recip.has_value());
}

TEST_CASE("planning-cost reciprocal convention") {
  const double inf = std::numeric_limits<double>::infinity();
  auto report =
      compute_metrics({trace_success_at(1, 50.0), trace_failure(5, inf)});
  REQUIRE(report.pc_recip.has_value());
  CHECK(*report.pc_recip == doctest::Approx(1.0));  // (100/50 + 0) / 2
}

TEST_CASE("tns is undefined when nothing succeeds") {
  auto report = compute_metrics({trace_failure(5), trace_failure(5)});
  CHECK(report.tsr == 0.0);
  CHECK(!report.tns.has_value());
  CHECK(!report.tns_ci.has_value());
}

TEST_CASE("compute_metrics is permutation invariant and rejects empty input") {
  std::vector<EpisodeTrace> traces = {trace_success_at(2), trace_failure(5),
                                      trace_success_at(4), trace_success_at(1)};
  auto a = compute_metrics(traces);
  std::reverse(traces.begin(), traces.end());
  auto b = compute_metrics(traces);
  CHECK(a.tsr == b.tsr);
  CHECK(*a.tns == *b.tns);
  CHECK(a.tsr_ci.lo == b.tsr_ci.lo);
  CHECK_THROWS_AS(compute_metrics({}), ArgumentError);
}

TEST_CASE("wilson interval matches the textbook value") {
  auto ci = wilson(50, 100);
  CHECK(ci.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(ci.hi == doctest::Approx(0.5962).epsilon(1e-3));
  CHECK(wilson(0, 10).lo == 0.0);
  CHECK(wilson(10, 10).hi == doctest::Approx(1.0));
  CHECK_THROWS_AS(wilson(0, 0), ArgumentError);
}

TEST_CASE("random exploration matches the without-replacement analytics") {
  // 20 classes, budget 5: tsr = 5/20 and tns uniform over 1..5 (mean 3).
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 20;
  task.classify.feature_dim = 8;
  EvalConfig cfg;
  auto report = evaluate_policy([] { return make_random_policy(20); }, task,
                                10000, /*seed=*/12345, cfg);
  CHECK(report.tsr_ci.contains(0.25));
  REQUIRE(report.tns_ci.has_value());
  CHECK(report.tns_ci->contains(3.0));
}

TEST_CASE("identical seeds give identical reports for sp and identity fmp1") {
  Rng rng(7);
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 12;
  task.classify.feature_dim = 6;
  auto base = PolicyWeights::make_base(6, 12, 16, rng);
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp1,
                                              MemEncoderKind::kIdentity,
                                              MemoryMode::kNormalized, rng);

  SuitePolicyProvider provider = [&](const std::string& name, const TaskSpec&,
                                     std::size_t, std::uint64_t) -> PolicyFactory {
    if (name == "sp") return [&] { return make_sorting_policy(base); };
    return [&] { return make_fmp1_policy(fa); };
  };
  auto rows = run_suite({"sp", "fmp1"}, {task}, 500, {1, 2}, EvalConfig{}, provider);
  REQUIRE(rows.size() == 4);
  for (std::uint64_t seed : {0, 1}) {
    const auto& sp = rows[seed];
    const auto& fmp = rows[2 + seed];
    CHECK(sp.seed == fmp.seed);
    CHECK(sp.metrics.tsr == fmp.metrics.tsr);
    CHECK(sp.metrics.successes == fmp.metrics.successes);
    CHECK(sp.metrics.tns == fmp.metrics.tns);
    CHECK(sp.metrics.tsr_ci.lo == fmp.metrics.tsr_ci.lo);
    CHECK(sp.metrics.tsr_ci.hi == fmp.metrics.tsr_ci.hi);
  }
}

TEST_CASE("tsr is monotone in the trial budget") {
  Rng rng(11);
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 10;
  task.classify.feature_dim = 6;
  task.classify.separation = 2.0;  // deliberately hard
  auto base = PolicyWeights::make_base(6, 10, 16, rng);
  double prev = -1.0;
  for (std::size_t budget = 1; budget <= 5; ++budget) {
    EvalConfig cfg;
    cfg.max_trials = budget;
    auto report = evaluate_policy([&] { return make_sorting_policy(base); },
                                  task, 800, /*seed=*/99, cfg);
    CHECK(report.tsr >= prev);
    prev = report.tsr;
  }
}

TEST_CASE("threaded evaluation reproduces the single-threaded report") {
  Rng rng(13);
  TaskSpec task = default_task(TaskKind::kCorrelated);
  task.correlated.actions = 15;
  auto base = PolicyWeights::make_base(15, 15, 16, rng);
  EvalConfig one;
  EvalConfig four;
  four.threads = 4;
  auto a = evaluate_policy([&] { return make_sorting_policy(base); }, task, 600,
                           7, one);
  auto b = evaluate_policy([&] { return make_sorting_policy(base); }, task, 600,
                           7, four);
  CHECK(a.tsr == b.tsr);
  CHECK(a.successes == b.successes);
  CHECK(a.tns == b.tns);
  CHECK(a.pc_recip == b.pc_recip);
}
