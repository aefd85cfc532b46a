#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "redecide/errors.hpp"
#include "redecide/policy.hpp"
#include "redecide/tasks.hpp"
#include "redecide/train.hpp"

using namespace redecide;

namespace {

bool bitwise_equal(const Array& a, const Array& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(double)) == 0;
}

bool sections_bitwise_equal(const ParamSet& a, const ParamSet& b) {
  if (a.names() != b.names()) return false;
  for (const auto& [name, entry] : a) {
    if (!bitwise_equal(entry.value, b.at(name))) return false;
  }
  return true;
}

// Uninformative observation, fixed label; the oracle passes only the label.
TaskInstance toy_instance(std::size_t label, std::size_t actions,
                          std::size_t obs_dim) {
  TaskInstance inst;
  inst.kind = TaskKind::kClassify;
  inst.observation = Array::zeros({obs_dim});
  inst.action_count = actions;
  inst.truth = ClassifyTruth{label};
  return inst;
}

// Base weights whose affordance argmax is pinned to action 0 regardless of
// the observation.
PolicyWeights pinned_base(std::size_t obs_dim, std::size_t actions,
                          std::size_t width, Rng& rng) {
  auto base = PolicyWeights::make_base(obs_dim, actions, width, rng);
  base.base_decoder.at("w").fill(0.0);
  Array bias = Array::zeros({actions});
  bias[0] = 2.0;
  bias[1] = 1.0;
  base.base_decoder.at("b") = bias;
  return base;
}

}  // namespace

TEST_CASE("replay buffer is a ring with uniform sampling") {
  ReplayBuffer buf(4);
  for (std::size_t i = 0; i < 6; ++i) {
    Transition t;
    t.action = i;
    buf.push(std::move(t));
  }
  CHECK(buf.size() == 4);
  // items 2..5 survive
  Rng rng(3);
  bool seen[6] = {};
  for (int i = 0; i < 200; ++i) seen[buf.sample(rng).action] = true;
  CHECK(!seen[0]);
  CHECK(!seen[1]);
  for (std::size_t i = 2; i < 6; ++i) CHECK(seen[i]);
}

TEST_CASE("epsilon schedule is linear with a floor") {
  EpsilonSchedule eps;
  eps.start = 1.0;
  eps.end = 0.05;
  eps.decay_episodes = 100;
  CHECK(eps.at(0, 1000) == doctest::Approx(1.0));
  CHECK(eps.at(50, 1000) == doctest::Approx(0.525));
  CHECK(eps.at(100, 1000) == doctest::Approx(0.05));
  CHECK(eps.at(900, 1000) == doctest::Approx(0.05));
}

TEST_CASE("behavior cloning overfits a tiny dataset") {
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 5;
  task.classify.feature_dim = 6;
  task.classify.separation = 4.0;
  Rng data_rng(7);
  std::vector<TaskInstance> dataset;
  for (int i = 0; i < 32; ++i) {
    dataset.push_back(gen_classification(task.classify, data_rng));
  }
  Rng init_rng(11);
  auto weights = PolicyWeights::make_base(6, 5, 32, init_rng);
  TrainConfig cfg;
  cfg.optim.kind = OptimizerKind::kAdam;
  cfg.optim.lr = 5e-3;
  cfg.loss = LossKind::kSmoothL1;
  cfg.epochs = 150;
  cfg.batch_size = 8;
  cfg.seed = 13;
  auto result = train_bc(weights, dataset, task, cfg);
  CHECK(result.epoch_losses.size() == 150);
  CHECK(result.epoch_losses.back() < result.epoch_losses.front());
  CHECK(bc_accuracy(weights, dataset, task) >= 0.99);
}

TEST_CASE("zero learning rate leaves weights bitwise unchanged") {
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 4;
  task.classify.feature_dim = 5;
  Rng data_rng(17);
  std::vector<TaskInstance> dataset;
  for (int i = 0; i < 8; ++i) {
    dataset.push_back(gen_classification(task.classify, data_rng));
  }
  Rng init_rng(19);
  auto weights = PolicyWeights::make_base(5, 4, 8, init_rng);
  PolicyWeights before = weights;
  TrainConfig cfg;
  cfg.optim.lr = 0.0;
  cfg.epochs = 3;
  cfg.seed = 1;
  train_bc(weights, dataset, task, cfg);
  CHECK(sections_bitwise_equal(weights.obs_encoder, before.obs_encoder));
  CHECK(sections_bitwise_equal(weights.base_decoder, before.base_decoder));
}

TEST_CASE("behavior cloning is deterministic per seed") {
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 4;
  task.classify.feature_dim = 5;
  Rng data_rng(23);
  std::vector<TaskInstance> dataset;
  for (int i = 0; i < 16; ++i) {
    dataset.push_back(gen_classification(task.classify, data_rng));
  }
  auto run = [&] {
    Rng init_rng(29);
    auto weights = PolicyWeights::make_base(5, 4, 8, init_rng);
    TrainConfig cfg;
    cfg.optim.lr = 1e-3;
    cfg.epochs = 5;
    cfg.batch_size = 4;
    cfg.seed = 31;
    return train_bc(weights, dataset, task, cfg).epoch_losses;
  };
  CHECK(run() == run());
  CHECK_THROWS_AS(
      train_bc(*std::make_unique<PolicyWeights>(
                   PolicyWeights::make_base(5, 4, 8, data_rng)),
               {}, task, TrainConfig{}),
      ArgumentError);
}

TEST_CASE("behavior-cloned classifier approaches the nearest-mean oracle") {
  TaskSpec task = default_task(TaskKind::kClassify);
  task.classify.classes = 8;
  task.classify.feature_dim = 12;
  task.classify.separation = 12.0;  // >= 10 sigma
  Rng data_rng(37);
  std::vector<TaskInstance> train_set, held_out;
  for (int i = 0; i < 600; ++i) {
    train_set.push_back(gen_classification(task.classify, data_rng));
  }
  for (int i = 0; i < 1000; ++i) {
    held_out.push_back(gen_classification(task.classify, data_rng));
  }
  Rng init_rng(41);
  auto weights = PolicyWeights::make_base(12, 8, 32, init_rng);
  TrainConfig cfg;
  cfg.optim.kind = OptimizerKind::kAdam;
  cfg.optim.lr = 3e-3;
  cfg.loss = LossKind::kSmoothL1;
  cfg.epochs = 30;
  cfg.batch_size = 32;
  cfg.seed = 43;
  train_bc(weights, train_set, task, cfg);
  CHECK(bc_accuracy(weights, held_out, task) >= 0.95);
}

TEST_CASE("q_targets arithmetic and masked bootstrap") {
  // Controlled bundle: zeroed encoder, base logits log([0.2, 0.5, 0.3]), so
  // the identity-variant Q is exactly aff . m (plus the value-head bias).
  Rng rng(47);
  auto base = PolicyWeights::make_base(2, 3, 4, rng);
  for (const char* n : {"w1", "w2"}) base.obs_encoder.at(n).fill(0.0);
  for (const char* n : {"b1", "b2"}) base.obs_encoder.at(n).fill(0.0);
  base.base_decoder.at("w").fill(0.0);
  base.base_decoder.at("b") =
      Array::vec({std::log(0.2), std::log(0.5), std::log(0.3)});
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp1,
                                              MemEncoderKind::kIdentity,
                                              MemoryMode::kBinary, rng);

  auto obs = std::make_shared<const Array>(Array::zeros({2}));

  Transition terminal;
  terminal.obs = obs;
  terminal.action = 1;
  terminal.reward = 1.0;
  terminal.terminal = true;

  Transition bootstrap;
  bootstrap.obs = obs;
  bootstrap.failed_before = {};
  bootstrap.action = 0;  // next support {1, 2}: Q' = [_, 0.5, 0.3]
  bootstrap.reward = 0.0;
  bootstrap.terminal = false;

  Array y = q_targets({terminal, bootstrap}, fa, 0.2);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(0.2 * 0.5));

  // Inflating the value-head bias at the failed index must not leak through
  // the support mask.
  auto inflated = fa;
  inflated.decoder.at("b")[0] = 100.0;
  Array y2 = q_targets({bootstrap}, inflated, 0.2);
  CHECK(y2[0] == doctest::Approx(0.2 * 0.5));
}

TEST_CASE("q_targets rejects exhausted non-terminal states") {
  Rng rng(53);
  auto base = PolicyWeights::make_base(2, 2, 4, rng);
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp1,
                                              MemEncoderKind::kIdentity,
                                              MemoryMode::kBinary, rng);
  Transition t;
  t.obs = std::make_shared<const Array>(Array::zeros({2}));
  t.failed_before = {0};
  t.action = 1;  // exhausts the two-action set
  t.terminal = false;
  CHECK_THROWS_AS(q_targets({t}, fa, 0.2), ConsistencyError);
}

TEST_CASE("dqn learns the always-pass action on the toy task") {
  const std::size_t kActions = 4, kObsDim = 3;
  InstanceSource source = [&](Rng&) { return toy_instance(1, kActions, kObsDim); };

  for (auto arch : {ArchKind::kFmp1, ArchKind::kFmp2}) {
    Rng rng(59);
    auto base = pinned_base(kObsDim, kActions, 8, rng);
    auto fa = PolicyWeights::make_failure_aware(
        base, arch,
        arch == ArchKind::kFmp1 ? MemEncoderKind::kReplica
                                : MemEncoderKind::kLearned,
        MemoryMode::kBinary, rng);

    TrainConfig cfg;
    cfg.optim.kind = OptimizerKind::kAdam;
    cfg.optim.lr = 5e-3;
    cfg.loss = LossKind::kSmoothL1;
    cfg.episodes = 400;
    cfg.batch_size = 16;
    cfg.buffer_capacity = 2000;
    cfg.target_sync_period = 50;
    Rng train_rng(61);
    auto result = dqn_train(fa, source, AssessConfig{}, cfg, train_rng);
    CHECK(result.episode_rewards.size() == 400);
    for (double r : result.episode_rewards) {
      CHECK((r == 0.0 || r == 1.0));  // binary rewards by default
    }

    // Greedy first re-choice after the pinned base action 0 fails.
    int hits = 0;
    const int evals = 1000;
    for (int e = 0; e < evals; ++e) {
      Array q = policy_q_values(fa, Array::zeros({kObsDim}), {0});
      FailureMemory m = derive_memory(fa, Array::zeros({kObsDim}), {0});
      if (argmax_over_support(q, m) == 1) ++hits;
    }
    CHECK(hits >= 990);
  }
}

TEST_CASE("gamma-zero dqn recovers the myopic-optimal ranking") {
  // Labels drawn with probabilities [0.1, 0.3, 0.6]; after the pinned first
  // action 0 fails, the myopic optimum is action 2, then action 1.
  const std::size_t kActions = 3, kObsDim = 2;
  InstanceSource source = [&](Rng& r) {
    const double u = r.uniform();
    const std::size_t label = u < 0.1 ? 0 : (u < 0.4 ? 1 : 2);
    return toy_instance(label, kActions, kObsDim);
  };
  Rng rng(67);
  auto base = pinned_base(kObsDim, kActions, 8, rng);
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp2,
                                              MemEncoderKind::kLearned,
                                              MemoryMode::kBinary, rng);
  TrainConfig cfg;
  cfg.optim.kind = OptimizerKind::kAdam;
  cfg.optim.lr = 5e-3;
  cfg.loss = LossKind::kSmoothL1;
  cfg.discount = 0.0;
  cfg.episodes = 1500;
  cfg.batch_size = 32;
  cfg.target_sync_period = 100;
  Rng train_rng(71);
  dqn_train(fa, source, AssessConfig{}, cfg, train_rng);

  Array obs = Array::zeros({kObsDim});
  Array q1 = policy_q_values(fa, obs, {0});
  FailureMemory m1 = derive_memory(fa, obs, {0});
  CHECK(argmax_over_support(q1, m1) == 2);
  Array q2 = policy_q_values(fa, obs, {0, 2});
  FailureMemory m2 = derive_memory(fa, obs, {0, 2});
  CHECK(argmax_over_support(q2, m2) == 1);
}

TEST_CASE("frozen base sections are bitwise stable through dqn training") {
  TaskSpec task = default_task(TaskKind::kCorrelated);
  task.correlated.actions = 10;
  Rng rng(73);
  auto base =
      PolicyWeights::make_base(task_obs_dim(task), task_action_count(task), 16, rng);
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp2,
                                              MemEncoderKind::kLearned,
                                              MemoryMode::kBinary, rng);
  PolicyWeights before = fa;
  TrainConfig cfg = default_train_config(TaskKind::kCorrelated);
  cfg.optim.lr = 1e-3;
  cfg.episodes = 300;
  cfg.batch_size = 16;
  cfg.min_buffer = 32;
  Rng train_rng(79);
  dqn_train(fa, task, cfg, train_rng);
  CHECK(sections_bitwise_equal(fa.obs_encoder, before.obs_encoder));
  CHECK(sections_bitwise_equal(fa.base_decoder, before.base_decoder));
  // and the trainable sections actually moved
  CHECK(!sections_bitwise_equal(fa.decoder, before.decoder));
}

TEST_CASE("dqn training is deterministic per seed") {
  TaskSpec task = default_task(TaskKind::kCorrelated);
  task.correlated.actions = 8;
  auto run = [&] {
    Rng rng(83);
    auto base = PolicyWeights::make_base(task_obs_dim(task),
                                         task_action_count(task), 12, rng);
    auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp1,
                                                MemEncoderKind::kIdentity,
                                                MemoryMode::kBinary, rng);
    TrainConfig cfg = default_train_config(TaskKind::kCorrelated);
    cfg.optim.lr = 1e-3;
    cfg.episodes = 60;
    cfg.batch_size = 8;
    Rng train_rng(89);
    auto result = dqn_train(fa, task, cfg, train_rng);
    return std::pair{result.episode_rewards, fa.decoder.at("w")};
  };
  auto [r1, w1] = run();
  auto [r2, w2] = run();
  CHECK(r1 == r2);
  CHECK(bitwise_equal(w1, w2));
}
