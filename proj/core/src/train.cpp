#include "redecide/train.hpp"

#include <algorithm>
#include <cmath>

#include "redecide/errors.hpp"

namespace redecide {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ArgumentError("replay buffer capacity must be >= 1");
  items_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  if (items_.empty()) throw ArgumentError("cannot sample an empty replay buffer");
  return items_[rng.below(items_.size())];
}

double EpsilonSchedule::at(std::size_t episode, std::size_t total_episodes) const {
  const std::size_t span = decay_episodes > 0 ? decay_episodes
                                              : std::max<std::size_t>(total_episodes / 2, 1);
  const double frac = std::min(1.0, static_cast<double>(episode) / static_cast<double>(span));
  return start + (end - start) * frac;
}

TrainConfig default_train_config(TaskKind kind) {
  TrainConfig cfg;
  switch (kind) {
    case TaskKind::kClassify:
      cfg.optim.kind = OptimizerKind::kSgdMomentum;
      cfg.optim.lr = 1e-4;
      cfg.optim.momentum = 0.9;
      cfg.optim.weight_decay = std::pow(2.0, -5.0);
      cfg.loss = LossKind::kL1;
      break;
    case TaskKind::kCorrelated:
      cfg.optim.kind = OptimizerKind::kAdam;
      cfg.optim.lr = 1e-4;
      cfg.optim.beta1 = 0.9;
      cfg.optim.beta2 = 0.99;
      cfg.optim.weight_decay = std::pow(2.0, -5.0);
      cfg.loss = LossKind::kSmoothL1;
      break;
    case TaskKind::kLocalize:
      cfg.optim.kind = OptimizerKind::kAdam;
      cfg.optim.lr = 1e-3;
      cfg.optim.beta1 = 0.9;
      cfg.optim.beta2 = 0.99;
      cfg.optim.weight_decay = std::pow(2.0, -6.0);
      cfg.loss = LossKind::kSmoothL1;
      break;
  }
  cfg.discount = 0.2;
  return cfg;
}

namespace {

// Gradient accumulator across per-transition tapes, keyed "section/name".
struct GradAccumulator {
  std::map<std::string, Array> sums;

  void prepare(const PolicyWeights& w) {
    for (const auto& [prefix, set] : w.sections()) {
      for (const auto& [name, entry] : *set) {
        if (!entry.trainable) continue;
        auto key = prefix + "/" + name;
        auto it = sums.find(key);
        if (it == sums.end()) {
          sums.emplace(key, Array(entry.value.shape()));
        } else {
          it->second.fill(0.0);
        }
      }
    }
  }

  void add(const Tape& t, const BoundWeights& b, const PolicyWeights& w) {
    for (const auto& [prefix, set] : w.sections()) {
      for (const auto& [name, entry] : *set) {
        if (!entry.trainable) continue;
        auto key = prefix + "/" + name;
        const Array& g = t.grad(b.at(key));
        Array& sum = sums.at(key);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
      }
    }
  }

  void scale(double factor) {
    for (auto& [key, g] : sums) {
      for (auto& v : g.data()) v *= factor;
    }
  }
};

// One optimizer per section so slot buffers follow plain parameter names.
class SectionOptimizers {
 public:
  explicit SectionOptimizers(OptimConfig cfg) : cfg_(cfg) {}

  void step(PolicyWeights& w, const GradAccumulator& acc) {
    for (auto& [prefix, set] : w.sections()) {
      bool any = false;
      for (const auto& [name, entry] : *set) {
        if (entry.trainable) any = true;
      }
      if (!any) continue;
      std::map<std::string, Array> grads;
      for (const auto& [name, entry] : *set) {
        if (!entry.trainable) continue;
        grads.emplace(name, acc.sums.at(prefix + "/" + name));
      }
      auto it = opts_.find(prefix);
      if (it == opts_.end()) it = opts_.emplace(prefix, Optimizer(cfg_)).first;
      it->second.step(*set, grads);
    }
  }

 private:
  OptimConfig cfg_;
  std::map<std::string, Optimizer> opts_;
};

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
}

}  // namespace

BcResult train_bc(PolicyWeights& weights, const std::vector<TaskInstance>& dataset,
                  const TaskSpec& task, const TrainConfig& cfg) {
  if (dataset.empty()) throw ArgumentError("train_bc: empty dataset");
  if (weights.arch.kind != ArchKind::kBase) {
    throw ArgumentError("train_bc: expected base policy weights");
  }
  std::vector<Array> targets;
  targets.reserve(dataset.size());
  for (const auto& inst : dataset) {
    if (inst.observation.size() != weights.arch.obs_dim ||
        inst.action_count != weights.arch.action_count) {
      throw DimensionError("train_bc: dataset does not match the policy shape");
    }
    targets.push_back(bc_target(inst, task.assess_cfg));
  }

  Rng rng(cfg.seed);
  SectionOptimizers opts(cfg.optim);
  GradAccumulator acc;
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  BcResult result;
  const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch_size, dataset.size()));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, order.size());
      acc.prepare(weights);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        Tape t;
        BoundWeights b = bind_weights(t, weights);
        auto probs = t.softmax(
            base_logits_node(t, b, t.param(&dataset[i].observation)));
        auto loss = loss_node(t, cfg.loss, probs, targets[i]);
        epoch_loss += t.value(loss)[0];
        t.backward(loss);
        acc.add(t, b, weights);
      }
      acc.scale(1.0 / static_cast<double>(stop - start));
      opts.step(weights, acc);
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(dataset.size()));
  }
  return result;
}

double bc_accuracy(const PolicyWeights& weights,
                   const std::vector<TaskInstance>& dataset,
                   const TaskSpec& task) {
  if (dataset.empty()) throw ArgumentError("bc_accuracy: empty dataset");
  std::size_t hits = 0;
  for (const auto& inst : dataset) {
    AffordanceMap aff = base_forward(inst.observation, weights);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < aff.size(); ++i) {
      if (aff.values[i] > aff.values[pick]) pick = i;
    }
    Array target = bc_target(inst, task.assess_cfg);
    std::size_t want = 0;
    for (std::size_t i = 1; i < target.size(); ++i) {
      if (target[i] > target[want]) want = i;
    }
    if (pick == want) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

Array q_targets(const std::vector<Transition>& batch,
                const PolicyWeights& target_weights, double discount) {
  Array y({batch.size()});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    if (tr.terminal) {
      y[i] = tr.reward;
      continue;
    }
    std::vector<std::size_t> next_failed = tr.failed_before;
    next_failed.push_back(tr.action);
    FailureMemory next_m =
        derive_memory(target_weights, *tr.obs, next_failed);
    if (next_m.support_size() == 0) {
      throw ConsistencyError("q_targets: non-terminal transition with exhausted memory");
    }
    Array q = policy_q_values(target_weights, *tr.obs, next_failed);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.size(); ++a) {
      if (next_m.values[a] > 0.0) best = std::max(best, q[a]);
    }
    y[i] = tr.reward + discount * best;
  }
  return y;
}

DqnResult dqn_train(PolicyWeights& weights, const TaskSpec& task,
                    const TrainConfig& cfg, Rng& rng) {
  if (weights.arch.action_count != task_action_count(task) ||
      weights.arch.obs_dim != task_obs_dim(task)) {
    throw ArgumentError("dqn_train: weights do not match the task dimensions");
  }
  if (weights.arch.memory_mode != task.memory_mode) {
    throw ArgumentError("dqn_train: weights and task disagree on memory mode");
  }
  return dqn_train(
      weights, [&task](Rng& r) { return generate(task, r); }, task.assess_cfg,
      cfg, rng);
}

DqnResult dqn_train(PolicyWeights& weights, const InstanceSource& source,
                    const AssessConfig& assess_cfg, const TrainConfig& cfg,
                    Rng& rng) {
  if (weights.arch.kind == ArchKind::kBase) {
    throw ArgumentError("dqn_train: expected failure-aware policy weights");
  }

  ReplayBuffer buffer(cfg.buffer_capacity);
  SectionOptimizers opts(cfg.optim);
  GradAccumulator acc;
  PolicyWeights target = weights;

  DqnResult result;
  result.episode_rewards.reserve(cfg.episodes);
  std::size_t env_steps = 0;
  std::size_t opt_steps = 0;
  double window_loss = 0.0;
  std::size_t window_opts = 0;

  const std::size_t min_fill = std::max(cfg.min_buffer, cfg.batch_size);

  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    const double epsilon = cfg.epsilon.at(episode, cfg.episodes);
    TaskInstance inst = source(rng);
    if (inst.action_count != weights.arch.action_count ||
        inst.observation.size() != weights.arch.obs_dim) {
      throw ArgumentError("dqn_train: instance does not match the policy shape");
    }
    auto obs = std::make_shared<const Array>(inst.observation);

    // Trial 0: the frozen base policy chooses; no transition is stored for it.
    AffordanceMap aff = base_forward(*obs, weights);
    FailureMemory memory = derive_memory(weights, *obs, {});
    std::vector<std::size_t> failed;
    double episode_reward = 0.0;

    std::size_t action = argmax_over_support(aff.values, memory);
    AssessmentOutcome out = assess(inst, action, assess_cfg);
    bool done = out.passed;
    if (out.passed) episode_reward = 1.0;

    for (std::size_t trial = 1; trial < cfg.max_trials && !done; ++trial) {
      failed.push_back(action);
      memory = update_memory(std::move(memory), action);
      if (memory.support_size() == 0) break;

      // epsilon-greedy re-choice over the untried actions
      if (rng.uniform() < epsilon) {
        action = select_random(memory, rng);
      } else {
        Array q = policy_q_values(weights, *obs, failed);
        action = argmax_over_support(q, memory);
      }
      out = assess(inst, action, assess_cfg);

      double reward = 0.0;
      if (out.passed) {
        reward = 1.0;
        if (cfg.success_cost_bonus > 0.0 && out.cost.has_value() &&
            std::isfinite(*out.cost) && *out.cost > 0.0) {
          reward += cfg.success_cost_bonus * (100.0 / *out.cost);
        }
      }
      const bool last_trial = trial + 1 == cfg.max_trials;
      std::vector<std::size_t> next_failed = failed;
      next_failed.push_back(action);
      const bool next_exhausted =
          !out.passed && next_failed.size() >= weights.arch.action_count;
      const bool terminal = out.passed || last_trial || next_exhausted;

      buffer.push(Transition{obs, failed, action, reward, terminal});
      episode_reward = std::max(episode_reward, reward);
      done = out.passed;
      ++env_steps;

      if (buffer.size() >= min_fill && env_steps % cfg.optimize_every == 0) {
        std::vector<Transition> batch;
        batch.reserve(cfg.batch_size);
        for (std::size_t k = 0; k < cfg.batch_size; ++k) {
          batch.push_back(buffer.sample(rng));
        }
        Array targets_y = q_targets(batch, target, cfg.discount);

        acc.prepare(weights);
        double batch_loss = 0.0;
        for (std::size_t k = 0; k < batch.size(); ++k) {
          Tape t;
          BoundWeights b = bind_weights(t, weights);
          auto q = policy_q_node(t, weights, b, *batch[k].obs,
                                 batch[k].failed_before);
          auto qa = t.pick(q, batch[k].action);
          auto loss = loss_node(t, cfg.loss, qa, Array::scalar(targets_y[k]));
          batch_loss += t.value(loss)[0];
          t.backward(loss);
          acc.add(t, b, weights);
        }
        acc.scale(1.0 / static_cast<double>(batch.size()));
        opts.step(weights, acc);
        window_loss += batch_loss / static_cast<double>(batch.size());
        ++window_opts;
        ++opt_steps;
        if (opt_steps % cfg.target_sync_period == 0) target = weights;
      }
    }

    result.episode_rewards.push_back(episode_reward);
    if ((episode + 1) % 50 == 0 || episode + 1 == cfg.episodes) {
      const std::size_t window = std::min<std::size_t>(episode + 1, 50);
      double sum = 0.0;
      for (std::size_t k = result.episode_rewards.size() - window;
           k < result.episode_rewards.size(); ++k) {
        sum += result.episode_rewards[k];
      }
      result.log.push_back(DqnLogRow{
          episode + 1, epsilon, sum / static_cast<double>(window),
          window_opts > 0 ? window_loss / static_cast<double>(window_opts) : 0.0});
      window_loss = 0.0;
      window_opts = 0;
    }
  }
  return result;
}

}  // namespace redecide
