#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "redecide/layers.hpp"
#include "redecide/optim.hpp"
#include "redecide/policy.hpp"
#include "redecide/rng.hpp"
#include "redecide/tasks.hpp"

namespace redecide {

// One stored decision of the failure-aware stage. The ordered failure list
// reconstructs both the memory at decision time and (for the recurrent
// policy) the hidden state, so replay is exact.
struct Transition {
  std::shared_ptr<const Array> obs;
  std::vector<std::size_t> failed_before;  // failures preceding this decision
  std::size_t action = 0;
  double reward = 0.0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);  // ring overwrite once full
  const Transition& sample(Rng& rng) const;
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  // Linear decay over this many episodes; 0 means half the total budget.
  std::size_t decay_episodes = 0;

  double at(std::size_t episode, std::size_t total_episodes) const;
};

struct TrainConfig {
  OptimConfig optim;
  LossKind loss = LossKind::kSmoothL1;
  double discount = 0.2;  // gamma
  std::size_t max_trials = 5;
  EpsilonSchedule epsilon;
  std::size_t buffer_capacity = 10000;
  std::size_t batch_size = 64;
  std::size_t target_sync_period = 500;  // optimization steps per hard sync
  std::size_t optimize_every = 1;        // re-choice steps per optimization step
  std::size_t min_buffer = 200;          // warmup before optimizing
  std::size_t episodes = 5000;           // failure-aware stage
  std::size_t epochs = 20;               // behavior cloning stage
  std::uint64_t seed = 0;
  // Cost-shaped success bonus lambda * (100 / cost) for cost-bearing tasks.
  // Zero by default, which keeps every training reward in {0, 1}.
  double success_cost_bonus = 0.0;
};

// Per-task defaults for the two training stages.
TrainConfig default_train_config(TaskKind kind);

struct BcResult {
  std::vector<double> epoch_losses;  // mean over samples, pre-update
};

// Supervised pretraining of the base policy on (observation, target) pairs.
// Minimizes cfg.loss between the affordance output and the task's
// supervision target; deterministic given (cfg.seed, dataset order).
BcResult train_bc(PolicyWeights& weights, const std::vector<TaskInstance>& dataset,
                  const TaskSpec& task, const TrainConfig& cfg);

struct DqnLogRow {
  std::size_t episode = 0;
  double epsilon = 0.0;
  double mean_reward = 0.0;  // trailing window
  double mean_loss = 0.0;    // over optimization steps in the window
};

struct DqnResult {
  std::vector<double> episode_rewards;
  std::vector<DqnLogRow> log;  // one row per 50 episodes
};

// Value-based training of a failure-aware policy. Episodes follow the
// invariant-observation protocol: the first action is the (frozen) base
// policy's argmax, re-choices are epsilon-greedy over the untried actions,
// and only re-choice decisions enter the replay buffer. Frozen parameters
// are untouched. Rewards are 1 on a pass (plus the optional cost bonus) and
// 0 otherwise; an episode terminates on pass or budget/action exhaustion.
DqnResult dqn_train(PolicyWeights& weights, const TaskSpec& task,
                    const TrainConfig& cfg, Rng& rng);

// Same loop over an arbitrary instance stream (used by tests and ablations).
using InstanceSource = std::function<TaskInstance(Rng&)>;
DqnResult dqn_train(PolicyWeights& weights, const InstanceSource& source,
                    const AssessConfig& assess_cfg, const TrainConfig& cfg,
                    Rng& rng);

// Bootstrap targets: r for terminal transitions, otherwise
// r + gamma * max over next-memory support of the target network's Q.
Array q_targets(const std::vector<Transition>& batch,
                const PolicyWeights& target_weights, double discount);

// Greedy evaluation-time accuracy of the base policy on a dataset.
double bc_accuracy(const PolicyWeights& weights,
                   const std::vector<TaskInstance>& dataset,
                   const TaskSpec& task);

}  // namespace redecide
