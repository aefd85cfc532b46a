#include "redecide/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "redecide/errors.hpp"
#include "redecide/io/binio.hpp"
#include "redecide/io/checkpoint.hpp"
#include "redecide/io/dataset.hpp"
#include "redecide/io/plot.hpp"
#include "redecide/io/report.hpp"
#include "redecide/metrics.hpp"
#include "redecide/policy.hpp"

namespace redecide {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kRunKeys = {"run.format_version", "run.seed"};
const std::vector<std::string> kTaskKeys = {
    "task.kind",        "task.classes",        "task.feature_dim",
    "task.separation",  "task.means_seed",     "task.actions",
    "task.correlation_length", "task.feasible_fraction", "task.noise",
    "task.base_cost",   "task.distance_cost",  "task.height",
    "task.width",       "task.beams",          "task.range_noise",
    "task.rooms",       "task.min_room",       "task.max_room",
    "task.k",           "task.memory_mode"};
const std::vector<std::string> kTrainKeys = {
    "train.optimizer",       "train.lr",
    "train.weight_decay",    "train.momentum",
    "train.beta1",           "train.beta2",
    "train.loss",            "train.batch_size",
    "train.epochs",          "train.dataset",
    "train.file",            "train.embed_width",
    "train.arch",            "train.mem_encoder",
    "train.episodes",        "train.gamma",
    "train.epsilon_start",   "train.epsilon_end",
    "train.epsilon_decay_episodes", "train.buffer_capacity",
    "train.target_sync",     "train.optimize_every",
    "train.min_buffer",      "train.max_trials",
    "train.base_checkpoint", "train.cost_bonus",
    "train.fmp2_emits_first"};
const std::vector<std::string> kDataKeys = {"data.count", "data.file"};
const std::vector<std::string> kEvalKeys = {
    "eval.policies",        "eval.episodes",          "eval.seeds",
    "eval.max_trials",      "eval.bc_checkpoint",     "eval.fmp1_checkpoint",
    "eval.fmp1_5_checkpoint", "eval.fmp2_checkpoint", "eval.csv",
    "eval.json"};
const std::vector<std::string> kSweepKeys = {
    "sweep.axis",   "sweep.values", "sweep.policies", "sweep.episodes",
    "sweep.seeds",  "sweep.max_trials", "sweep.plot", "sweep.csv",
    "sweep.json"};
const std::vector<std::string> kPlotKeys = {"plot.csv", "plot.out_prefix"};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> lists) {
  std::vector<std::string> out;
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  return out;
}

std::string resolve_path(const RunOptions& opts, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(opts.out_dir) / p).string();
}

std::string config_echo_with_seed(const KeyValueConfig& cfg, std::uint64_t seed) {
  KeyValueConfig copy = cfg;
  copy.set("run", "seed", std::to_string(seed));
  return copy.echo();
}

void note(const RunOptions& opts, const std::string& line) {
  if (!opts.quiet) std::cout << line << "\n";
}

std::vector<std::uint64_t> parse_seeds(const KeyValueConfig& cfg,
                                       const std::string& section,
                                       std::uint64_t fallback) {
  if (!cfg.has(section, "seeds")) return {fallback};
  std::vector<std::uint64_t> seeds;
  for (const auto& item : cfg.get_list(section, "seeds")) {
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("bad seed value in " + section + ".seeds: " + item);
    }
  }
  return seeds;
}

Checkpoint load_checkpoint_for(const std::string& role, const std::string& path) {
  if (!fs::exists(path)) {
    throw DependencyError(role + " checkpoint not found: " + path);
  }
  return load_checkpoint(path);
}

// Everything a suite evaluation needs to own while policies run.
struct PolicyStore {
  std::map<std::string, std::unique_ptr<PolicyWeights>> weights;

  const PolicyWeights* get(const std::string& name) const {
    auto it = weights.find(name);
    return it == weights.end() ? nullptr : it->second.get();
  }
};

std::string checkpoint_key(const std::string& policy) {
  if (policy == "fmp1.5") return "fmp1_5_checkpoint";
  return policy + "_checkpoint";
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Axis token from a sweep task label ("correlated@ell=5" -> "ell").
std::string axis_token(const std::vector<ReportRow>& rows) {
  for (const auto& row : rows) {
    const auto at = row.task_label.find('@');
    const auto eq = row.task_label.find('=');
    if (at != std::string::npos && eq != std::string::npos && eq > at + 1) {
      return row.task_label.substr(at + 1, eq - at - 1);
    }
  }
  return "sweep axis";
}

// Aggregates sweep rows into per-policy series (mean over seeds per value).
std::vector<PlotSeries> series_from_rows(const std::vector<ReportRow>& rows,
                                         bool use_tns) {
  std::map<std::string, std::map<double, std::vector<double>>> grouped;
  for (const auto& row : rows) {
    if (!row.sweep_value.has_value()) continue;
    if (use_tns) {
      if (row.metrics.tns.has_value()) {
        grouped[row.policy][*row.sweep_value].push_back(*row.metrics.tns);
      }
    } else {
      grouped[row.policy][*row.sweep_value].push_back(row.metrics.tsr);
    }
  }
  std::vector<PlotSeries> series;
  for (const auto& [policy, by_value] : grouped) {
    PlotSeries s;
    s.label = policy;
    for (const auto& [value, ys] : by_value) {
      s.points.emplace_back(value, mean_of(ys));
    }
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

std::uint64_t resolve_seed(const KeyValueConfig& cfg, const RunOptions& opts) {
  if (opts.seed.has_value()) return *opts.seed;
  return cfg.get_u64_or("run", "seed", 0);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index) {
  Rng rng = Rng::stream(master, tag ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return rng.next_u64();
}

TaskSpec parse_task(const KeyValueConfig& cfg) {
  const std::string kind_str = cfg.get("task", "kind");
  TaskSpec spec = default_task(task_kind_from_string(kind_str));
  switch (spec.kind) {
    case TaskKind::kClassify:
      spec.classify.classes = cfg.get_u64_or("task", "classes", spec.classify.classes);
      spec.classify.feature_dim =
          cfg.get_u64_or("task", "feature_dim", spec.classify.feature_dim);
      spec.classify.separation =
          cfg.get_double_or("task", "separation", spec.classify.separation);
      spec.classify.means_seed =
          cfg.get_u64_or("task", "means_seed", spec.classify.means_seed);
      break;
    case TaskKind::kCorrelated:
      spec.correlated.actions = cfg.get_u64_or("task", "actions", spec.correlated.actions);
      spec.correlated.correlation_length = cfg.get_double_or(
          "task", "correlation_length", spec.correlated.correlation_length);
      spec.correlated.feasible_fraction = cfg.get_double_or(
          "task", "feasible_fraction", spec.correlated.feasible_fraction);
      spec.correlated.noise = cfg.get_double_or("task", "noise", spec.correlated.noise);
      spec.correlated.base_cost =
          cfg.get_double_or("task", "base_cost", spec.correlated.base_cost);
      spec.correlated.distance_cost =
          cfg.get_double_or("task", "distance_cost", spec.correlated.distance_cost);
      break;
    case TaskKind::kLocalize:
      spec.localize.height = cfg.get_u64_or("task", "height", spec.localize.height);
      spec.localize.width = cfg.get_u64_or("task", "width", spec.localize.width);
      spec.localize.beams = cfg.get_u64_or("task", "beams", spec.localize.beams);
      spec.localize.range_noise =
          cfg.get_double_or("task", "range_noise", spec.localize.range_noise);
      spec.localize.rooms = cfg.get_u64_or("task", "rooms", spec.localize.rooms);
      spec.localize.min_room = cfg.get_u64_or("task", "min_room", spec.localize.min_room);
      spec.localize.max_room = cfg.get_u64_or("task", "max_room", spec.localize.max_room);
      break;
  }
  spec.assess_cfg.neighborhood =
      cfg.get_u64_or("task", "k", spec.assess_cfg.neighborhood);
  if (cfg.has("task", "memory_mode")) {
    spec.memory_mode = memory_mode_from_string(cfg.get("task", "memory_mode"));
  }
  return spec;
}

TrainConfig parse_train(const KeyValueConfig& cfg, TaskKind kind,
                        std::uint64_t master_seed) {
  TrainConfig t = default_train_config(kind);
  if (cfg.has("train", "optimizer")) {
    t.optim.kind = optimizer_kind_from_string(cfg.get("train", "optimizer"));
  }
  t.optim.lr = cfg.get_double_or("train", "lr", t.optim.lr);
  t.optim.weight_decay =
      cfg.get_double_or("train", "weight_decay", t.optim.weight_decay);
  t.optim.momentum = cfg.get_double_or("train", "momentum", t.optim.momentum);
  t.optim.beta1 = cfg.get_double_or("train", "beta1", t.optim.beta1);
  t.optim.beta2 = cfg.get_double_or("train", "beta2", t.optim.beta2);
  if (cfg.has("train", "loss")) {
    t.loss = loss_kind_from_string(cfg.get("train", "loss"));
  }
  t.batch_size = cfg.get_u64_or("train", "batch_size", t.batch_size);
  t.epochs = cfg.get_u64_or("train", "epochs", t.epochs);
  t.episodes = cfg.get_u64_or("train", "episodes", t.episodes);
  t.discount = cfg.get_double_or("train", "gamma", t.discount);
  t.epsilon.start = cfg.get_double_or("train", "epsilon_start", t.epsilon.start);
  t.epsilon.end = cfg.get_double_or("train", "epsilon_end", t.epsilon.end);
  t.epsilon.decay_episodes =
      cfg.get_u64_or("train", "epsilon_decay_episodes", t.epsilon.decay_episodes);
  t.buffer_capacity = cfg.get_u64_or("train", "buffer_capacity", t.buffer_capacity);
  t.target_sync_period = cfg.get_u64_or("train", "target_sync", t.target_sync_period);
  t.optimize_every = cfg.get_u64_or("train", "optimize_every", t.optimize_every);
  t.min_buffer = cfg.get_u64_or("train", "min_buffer", t.min_buffer);
  t.max_trials = cfg.get_u64_or("train", "max_trials", t.max_trials);
  t.success_cost_bonus = cfg.get_double_or("train", "cost_bonus", t.success_cost_bonus);
  t.seed = master_seed;
  if (!(t.discount >= 0.0 && t.discount < 1.0)) {
    throw ConfigError("train.gamma must lie in [0, 1)");
  }
  return t;
}

void cmd_gen_data(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kTaskKeys, kDataKeys}));
  const std::uint64_t seed = resolve_seed(cfg, opts);
  TaskSpec task = parse_task(cfg);
  const std::size_t count = cfg.get_u64_or("data", "count", 1000);
  const std::string file = cfg.get_or("data", "file", "dataset.rdd");

  Dataset ds = generate_dataset(task, count, seed, config_echo_with_seed(cfg, seed));
  fs::create_directories(opts.out_dir);
  const std::string path = resolve_path(opts, file);
  write_dataset(path, ds);
  note(opts, "wrote " + std::to_string(count) + " " + to_string(task.kind) +
                 " instances to " + path);
}

void cmd_train_bc(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kTrainKeys}));
  const std::uint64_t seed = resolve_seed(cfg, opts);
  if (!cfg.has("train", "dataset")) {
    throw ConfigError("train-bc requires train.dataset");
  }
  const std::string dataset_path = resolve_path(opts, cfg.get("train", "dataset"));
  if (!fs::exists(dataset_path)) {
    throw DependencyError("dataset not found: " + dataset_path);
  }
  Dataset ds = read_dataset(dataset_path);

  TrainConfig train_cfg = parse_train(cfg, ds.task.kind, seed);
  const std::size_t width = cfg.get_u64_or("train", "embed_width", 64);
  Rng init_rng = Rng::stream(seed, 0xB001);
  auto weights = PolicyWeights::make_base(task_obs_dim(ds.task),
                                          task_action_count(ds.task), width,
                                          init_rng);
  BcResult result = train_bc(weights, ds.instances, ds.task, train_cfg);
  const double accuracy = bc_accuracy(weights, ds.instances, ds.task);

  fs::create_directories(opts.out_dir);
  const std::string file = cfg.get_or("train", "file", "bc.ckpt");
  const std::string path = resolve_path(opts, file);
  save_checkpoint(path, weights, config_echo_with_seed(cfg, seed));

  std::string log = "epoch,loss\n";
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
    log += std::to_string(e + 1) + "," + format_double(result.epoch_losses[e]) + "\n";
  }
  write_file_bytes(resolve_path(opts, "bc_log.csv"), log);
  note(opts, "behavior cloning done: final loss " +
                 format_double(result.epoch_losses.back()) + ", train accuracy " +
                 format_double(accuracy) + ", checkpoint " + path);
}

void cmd_train_fa(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kTaskKeys, kTrainKeys}));
  const std::uint64_t seed = resolve_seed(cfg, opts);
  TaskSpec task = parse_task(cfg);
  if (!cfg.has("train", "base_checkpoint")) {
    throw DependencyError("train-fa requires train.base_checkpoint");
  }
  Checkpoint base = load_checkpoint_for(
      "base", resolve_path(opts, cfg.get("train", "base_checkpoint")));
  if (base.weights.arch.action_count != task_action_count(task) ||
      base.weights.arch.obs_dim != task_obs_dim(task)) {
    throw ConfigError("base checkpoint does not match the task dimensions");
  }

  const std::string arch_str = cfg.get_or("train", "arch", "fmp2");
  ArchKind kind;
  MemEncoderKind mem;
  if (arch_str == "fmp1.5") {
    kind = ArchKind::kFmp1;
    mem = MemEncoderKind::kLearned;
  } else {
    kind = arch_kind_from_string(arch_str);
    mem = kind == ArchKind::kFmp2 ? MemEncoderKind::kLearned
                                  : MemEncoderKind::kIdentity;
  }
  if (cfg.has("train", "mem_encoder")) {
    mem = mem_encoder_from_string(cfg.get("train", "mem_encoder"));
  }

  Rng init_rng = Rng::stream(seed, 0xFA01);
  auto fa = PolicyWeights::make_failure_aware(base.weights, kind, mem,
                                              task.memory_mode, init_rng);
  fa.arch.fmp2_emits_first = cfg.get_bool_or("train", "fmp2_emits_first", false);

  TrainConfig train_cfg = parse_train(cfg, task.kind, seed);
  Rng train_rng = Rng::stream(seed, 0xD001);
  DqnResult result = dqn_train(fa, task, train_cfg, train_rng);

  fs::create_directories(opts.out_dir);
  const std::string file = cfg.get_or("train", "file", "fa.ckpt");
  const std::string path = resolve_path(opts, file);
  save_checkpoint(path, fa, config_echo_with_seed(cfg, seed));

  std::string log = "episode,epsilon,mean_reward,loss\n";
  for (const auto& row : result.log) {
    log += std::to_string(row.episode) + "," + format_double(row.epsilon) + "," +
           format_double(row.mean_reward) + "," + format_double(row.mean_loss) + "\n";
  }
  write_file_bytes(resolve_path(opts, "fa_log.csv"), log);
  const double tail = result.log.empty() ? 0.0 : result.log.back().mean_reward;
  note(opts, "dqn training done: trailing mean reward " + format_double(tail) +
                 ", checkpoint " + path);
}

namespace {

// Builds the weight store for an eval run: learned policies must have their
// checkpoints, base-policy baselines fall back to a seeded random base when
// no bc_checkpoint is given.
PolicyStore build_store(const KeyValueConfig& cfg, const RunOptions& opts,
                        const TaskSpec& task,
                        const std::vector<std::string>& policies,
                        std::uint64_t seed) {
  PolicyStore store;
  const bool needs_base =
      std::any_of(policies.begin(), policies.end(), [](const std::string& p) {
        return p == "sp" || p == "lpre";
      });
  if (needs_base) {
    std::unique_ptr<PolicyWeights> base;
    if (cfg.has("eval", "bc_checkpoint")) {
      auto ck = load_checkpoint_for(
          "bc", resolve_path(opts, cfg.get("eval", "bc_checkpoint")));
      base = std::make_unique<PolicyWeights>(std::move(ck.weights));
    } else {
      Rng rng = Rng::stream(seed, 0xBA5E);
      base = std::make_unique<PolicyWeights>(PolicyWeights::make_base(
          task_obs_dim(task), task_action_count(task), 64, rng));
    }
    if (base->arch.action_count != task_action_count(task) ||
        base->arch.obs_dim != task_obs_dim(task)) {
      throw ConfigError("bc checkpoint does not match the task dimensions");
    }
    store.weights.emplace("base", std::move(base));
  }
  for (const auto& name : policies) {
    if (!policy_needs_training(name)) continue;
    const std::string key = checkpoint_key(name);
    if (!cfg.has("eval", key)) {
      throw DependencyError("policy '" + name + "' requires eval." + key);
    }
    auto ck = load_checkpoint_for(name, resolve_path(opts, cfg.get("eval", key)));
    if (ck.weights.arch.action_count != task_action_count(task) ||
        ck.weights.arch.obs_dim != task_obs_dim(task)) {
      throw ConfigError("checkpoint for '" + name +
                        "' does not match the task dimensions");
    }
    if (ck.weights.arch.memory_mode != task.memory_mode) {
      throw ConfigError("checkpoint for '" + name +
                        "' was trained with a different memory mode");
    }
    store.weights.emplace(name, std::make_unique<PolicyWeights>(std::move(ck.weights)));
  }
  return store;
}

}  // namespace

void cmd_eval(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kTaskKeys, kEvalKeys}));
  const std::uint64_t seed = resolve_seed(cfg, opts);
  TaskSpec task = parse_task(cfg);
  const auto policies = cfg.get_list("eval", "policies");
  const std::size_t episodes = cfg.get_u64_or("eval", "episodes", 1000);
  const auto seeds = parse_seeds(cfg, "eval", seed);

  PolicyStore store = build_store(cfg, opts, task, policies, seed);
  EvalConfig eval_cfg;
  eval_cfg.max_trials = cfg.get_u64_or("eval", "max_trials", 5);
  eval_cfg.threads = opts.threads;

  SuitePolicyProvider provider = [&](const std::string& name, const TaskSpec& t,
                                     std::size_t, std::uint64_t) -> PolicyFactory {
    const PolicyWeights* w = policy_needs_training(name)
                                 ? store.get(name)
                                 : store.get("base");
    const std::size_t n = task_action_count(t);
    return [name, w, n] { return make_policy(name, w, n); };
  };
  auto rows = run_suite(policies, {task}, episodes, seeds, eval_cfg, provider);

  const std::string echo = config_echo_with_seed(cfg, seed);
  const std::string config_hash = hash_hex(echo);
  std::vector<ReportRow> report;
  for (const auto& row : rows) {
    ReportRow r;
    r.policy = row.policy;
    r.task_label = to_string(task.kind);
    r.config_hash = config_hash;
    r.seed = row.seed;
    r.metrics = row.metrics;
    report.push_back(std::move(r));
  }

  fs::create_directories(opts.out_dir);
  const std::string csv_path = resolve_path(opts, cfg.get_or("eval", "csv", "report.csv"));
  const std::string json_path =
      resolve_path(opts, cfg.get_or("eval", "json", "report.json"));
  write_file_bytes(csv_path, report_csv(report));
  write_file_bytes(json_path, report_json(report, echo));
  note(opts, "evaluated " + std::to_string(policies.size()) + " policies x " +
                 std::to_string(seeds.size()) + " seeds -> " + csv_path);
}

void cmd_sweep(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kTaskKeys, kDataKeys, kTrainKeys, kSweepKeys}));
  const std::uint64_t seed = resolve_seed(cfg, opts);
  TaskSpec base_task = parse_task(cfg);
  const std::string axis = cfg.get("sweep", "axis");
  if (axis != "correlation_length" && axis != "neighborhood") {
    throw ConfigError("sweep.axis must be correlation_length or neighborhood");
  }
  if (axis == "correlation_length" && base_task.kind != TaskKind::kCorrelated) {
    throw ConfigError("correlation_length sweeps require the correlated task");
  }
  if (axis == "neighborhood" && base_task.kind != TaskKind::kLocalize) {
    throw ConfigError("neighborhood sweeps require the localize task");
  }

  std::vector<double> values;
  for (const auto& item : cfg.get_list("sweep", "values")) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad sweep value: " + item);
    }
  }
  const auto policies = cfg.get_list("sweep", "policies");
  const std::size_t episodes = cfg.get_u64_or("sweep", "episodes", 1000);
  const auto seeds = parse_seeds(cfg, "sweep", seed);
  const std::size_t bc_count = cfg.get_u64_or("data", "count", 1500);

  EvalConfig eval_cfg;
  eval_cfg.max_trials = cfg.get_u64_or("sweep", "max_trials", 5);
  eval_cfg.threads = opts.threads;

  const std::string echo = config_echo_with_seed(cfg, seed);
  const std::string config_hash = hash_hex(echo);

  std::vector<ReportRow> report;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    TaskSpec task = base_task;
    std::string label;
    if (axis == "correlation_length") {
      task.correlated.correlation_length = values[vi];
      label = to_string(task.kind) + "@ell=" + format_double(values[vi]);
    } else {
      task.assess_cfg.neighborhood = static_cast<std::size_t>(values[vi]);
      label = to_string(task.kind) + "@k=" + format_double(values[vi]);
    }

    for (std::uint64_t cell_seed : seeds) {
      // Self-contained cell: behavior cloning, then value-based training for
      // each learned policy, then a shared-instance evaluation.
      const std::uint64_t data_seed = derive_seed(cell_seed, 0xDA7A, vi);
      Dataset ds = generate_dataset(task, bc_count, data_seed, "");
      Rng bc_init = Rng::stream(cell_seed, 0xB001 + vi);
      auto base = std::make_unique<PolicyWeights>(PolicyWeights::make_base(
          task_obs_dim(task), task_action_count(task),
          cfg.get_u64_or("train", "embed_width", 64), bc_init));
      TrainConfig bc_cfg = parse_train(cfg, task.kind, derive_seed(cell_seed, 0xBC, vi));
      train_bc(*base, ds.instances, task, bc_cfg);

      PolicyStore store;
      store.weights.emplace("base", std::move(base));
      for (const auto& name : policies) {
        if (!policy_needs_training(name)) continue;
        ArchKind kind = name == "fmp2" ? ArchKind::kFmp2 : ArchKind::kFmp1;
        MemEncoderKind mem = name == "fmp2"
                                 ? MemEncoderKind::kLearned
                                 : (name == "fmp1.5" ? MemEncoderKind::kLearned
                                                     : MemEncoderKind::kIdentity);
        Rng fa_init = Rng::stream(cell_seed, 0xFA01 + vi);
        auto fa = std::make_unique<PolicyWeights>(PolicyWeights::make_failure_aware(
            *store.get("base"), kind, mem, task.memory_mode, fa_init));
        TrainConfig fa_cfg = parse_train(cfg, task.kind, cell_seed);
        Rng train_rng = Rng::stream(cell_seed, 0xD001 + vi);
        dqn_train(*fa, task, fa_cfg, train_rng);
        store.weights.emplace(name, std::move(fa));
      }

      SuitePolicyProvider provider =
          [&](const std::string& name, const TaskSpec& t, std::size_t,
              std::uint64_t) -> PolicyFactory {
        const PolicyWeights* w = policy_needs_training(name)
                                     ? store.get(name)
                                     : store.get("base");
        const std::size_t n = task_action_count(t);
        return [name, w, n] { return make_policy(name, w, n); };
      };
      auto rows = run_suite(policies, {task}, episodes, {cell_seed}, eval_cfg,
                            provider);
      for (const auto& row : rows) {
        ReportRow r;
        r.policy = row.policy;
        r.task_label = label;
        r.config_hash = config_hash;
        r.seed = row.seed;
        r.metrics = row.metrics;
        r.sweep_value = values[vi];
        report.push_back(std::move(r));
      }
      note(opts, "sweep cell " + label + " seed " + std::to_string(cell_seed) +
                     " done");
    }
  }

  fs::create_directories(opts.out_dir);
  const std::string csv_path = resolve_path(opts, cfg.get_or("sweep", "csv", "sweep.csv"));
  const std::string json_path =
      resolve_path(opts, cfg.get_or("sweep", "json", "sweep.json"));
  write_file_bytes(csv_path, report_csv(report));
  write_file_bytes(json_path, report_json(report, echo));
  note(opts, "sweep report -> " + csv_path);

  if (cfg.get_bool_or("sweep", "plot", false)) {
    const std::string x_label = axis_token(report);
    auto tsr_series = series_from_rows(report, /*use_tns=*/false);
    write_file_bytes(resolve_path(opts, "sweep_tsr.svg"),
                     svg_line_chart("task success rate", x_label, "tsr", tsr_series));
    auto tns_series = series_from_rows(report, /*use_tns=*/true);
    if (!tns_series.empty()) {
      write_file_bytes(resolve_path(opts, "sweep_tns.svg"),
                       svg_line_chart("trials to success", x_label, "tns", tns_series));
    }
  }
}

void cmd_plot(const KeyValueConfig& cfg, const RunOptions& opts) {
  cfg.require_known(concat({kRunKeys, kPlotKeys}));
  const std::string csv_path = resolve_path(opts, cfg.get("plot", "csv"));
  if (!fs::exists(csv_path)) {
    throw DependencyError("plot input not found: " + csv_path);
  }
  auto rows = parse_report_csv(read_file_bytes(csv_path));
  const std::string prefix = cfg.get_or("plot", "out_prefix", "plot");

  auto tsr_series = series_from_rows(rows, /*use_tns=*/false);
  if (tsr_series.empty()) {
    throw ConfigError("plot: the CSV holds no sweep rows (task labels lack '@axis=value')");
  }
  const std::string x_label = axis_token(rows);
  fs::create_directories(opts.out_dir);
  write_file_bytes(resolve_path(opts, prefix + "_tsr.svg"),
                   svg_line_chart("task success rate", x_label, "tsr", tsr_series));
  auto tns_series = series_from_rows(rows, /*use_tns=*/true);
  if (!tns_series.empty()) {
    write_file_bytes(resolve_path(opts, prefix + "_tns.svg"),
                     svg_line_chart("trials to success", x_label, "tns", tns_series));
  }
  note(opts, "plots written under " + opts.out_dir);
}

void run_command(const std::string& command, const RunOptions& opts) {
  if (opts.config_path.empty()) throw ConfigError("missing --config");
  KeyValueConfig cfg = KeyValueConfig::parse_file(opts.config_path);
  const std::uint64_t version = cfg.get_u64_or("run", "format_version", 1);
  if (version != 1) {
    throw ConfigError("unsupported config format_version " + std::to_string(version));
  }
  if (command == "gen-data") return cmd_gen_data(cfg, opts);
  if (command == "train-bc") return cmd_train_bc(cfg, opts);
  if (command == "train-fa") return cmd_train_fa(cfg, opts);
  if (command == "eval") return cmd_eval(cfg, opts);
  if (command == "sweep") return cmd_sweep(cfg, opts);
  if (command == "plot") return cmd_plot(cfg, opts);
  throw ConfigError("unknown command: " + command);
}

}  // namespace redecide
