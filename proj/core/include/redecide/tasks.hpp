#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "redecide/episode.hpp"
#include "redecide/rng.hpp"

namespace redecide {

enum class TaskKind { kClassify, kCorrelated, kLocalize };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind kind);

// Class-conditional Gaussian features. The per-class means are a pure
// function of the config (including means_seed), so every instance of a
// config shares them; unit-variance noise is drawn from the instance rng.
// Means sit on a sphere of radius separation/sqrt(2), which puts random
// directions at mutual distance ~separation.
struct ClassifyConfig {
  std::size_t classes = 20;
  std::size_t feature_dim = 16;
  double separation = 6.0;
  std::uint64_t means_seed = 0;
};

// A ring of candidate actions with spatially correlated feasibility: a
// Gaussian-smoothed latent field (circular kernel, length ell) thresholded to
// the target feasible fraction. Costs grow with ring distance from action 0;
// infeasible actions cost +infinity. The observation is the latent field
// corrupted with Gaussian noise.
struct CorrelatedConfig {
  std::size_t actions = 25;
  double correlation_length = 5.0;  // ell; 0 means i.i.d. feasibility
  double feasible_fraction = 0.35;
  double noise = 0.8;
  double base_cost = 20.0;
  double distance_cost = 1.0;
};

// Random rooms-and-corridors occupancy map; the true pose is a uniformly
// random free cell and the observation is (map, scan) where the scan holds
// `beams` raycast ranges from the true pose at heading 0, noise-corrupted.
struct LocalizeConfig {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t beams = 16;
  double range_noise = 0.1;
  std::size_t rooms = 5;
  std::size_t min_room = 4;
  std::size_t max_room = 9;
};

// Localization success is a k x k box around the truth (k odd); the box is
// clipped at map borders, so truth cells near a border pass fewer actions.
struct AssessConfig {
  std::size_t neighborhood = 5;  // k
};

struct GridMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> occupancy;  // row-major, 1 = occupied

  bool occupied(std::size_t row, std::size_t col) const {
    return occupancy[row * width + col] != 0;
  }
  std::size_t cell_index(std::size_t row, std::size_t col) const {
    return row * width + col;
  }
};

struct CostTable {
  std::vector<double> costs;  // finite iff the action is feasible
  bool feasible(std::size_t action) const;
};

struct ClassifyTruth {
  std::size_t label = 0;
};
struct CorrelatedTruth {
  CostTable costs;
};
struct LocalizeTruth {
  GridMap map;
  std::size_t row = 0, col = 0;
};

struct TaskInstance {
  TaskKind kind = TaskKind::kClassify;
  Array observation;
  std::size_t action_count = 0;
  std::variant<ClassifyTruth, CorrelatedTruth, LocalizeTruth> truth;
};

TaskInstance gen_classification(const ClassifyConfig& cfg, Rng& rng);
TaskInstance gen_correlated(const CorrelatedConfig& cfg, Rng& rng);
TaskInstance gen_localization(const LocalizeConfig& cfg, Rng& rng);

// Fixed per-class means for a classification config.
std::vector<Array> class_means(const ClassifyConfig& cfg);

// Ranges to the first occupied cell along `beams` evenly spaced headings,
// measured center-to-center in cell units. Traversal is a supercover grid
// walk: when a ray crosses a lattice corner exactly, both flanking cells are
// checked (their center distances tie by symmetry), which keeps the result
// invariant under quarter-turn rotations.
Array raycast(const GridMap& map, std::size_t row, std::size_t col,
              double heading, std::size_t beams);

// Deterministic, stateless pass/fail oracle over instance ground truth.
AssessmentOutcome assess(const TaskInstance& instance, std::size_t action,
                         const AssessConfig& cfg = {});

// Behavior-cloning supervision target: one-hot label / softmax(-cost) /
// normalized Gaussian blob (sigma = k/3) at the true cell.
Array bc_target(const TaskInstance& instance, const AssessConfig& cfg = {});

// One task family with its assessment settings and memory-mode convention.
struct TaskSpec {
  TaskKind kind = TaskKind::kClassify;
  ClassifyConfig classify;
  CorrelatedConfig correlated;
  LocalizeConfig localize;
  AssessConfig assess_cfg;
  MemoryMode memory_mode = MemoryMode::kNormalized;
};

// Paper conventions: classification keeps a normalized memory, the other two
// a binary one.
TaskSpec default_task(TaskKind kind);

TaskInstance generate(const TaskSpec& spec, Rng& rng);
std::size_t task_action_count(const TaskSpec& spec);
std::size_t task_obs_dim(const TaskSpec& spec);
OracleFn make_oracle(const TaskInstance& instance, const AssessConfig& cfg);

// Spec-shaped convenience: run one episode against the instance's oracle.
EpisodeTrace run_episode(DecisionPolicy& policy, const TaskInstance& instance,
                         const AssessConfig& assess_cfg,
                         const EpisodeConfig& cfg, Rng& rng);

// Quantile of the standard normal (bisection on erfc; |p| in (0,1)).
double standard_normal_quantile(double p);

}  // namespace redecide
