#include "redecide/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redecide/errors.hpp"

namespace redecide {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "classify") return TaskKind::kClassify;
  if (s == "correlated") return TaskKind::kCorrelated;
  if (s == "localize") return TaskKind::kLocalize;
  throw ArgumentError("unknown task kind: " + s);
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kClassify: return "classify";
    case TaskKind::kCorrelated: return "correlated";
    default: return "localize";
  }
}

bool CostTable::feasible(std::size_t action) const {
  return std::isfinite(costs[action]);
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("standard_normal_quantile: p must be in (0,1)");
  }
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Array> class_means(const ClassifyConfig& cfg) {
  if (cfg.classes < 2 || cfg.feature_dim < 1) {
    throw ArgumentError("classification config requires C >= 2 and d >= 1");
  }
  if (cfg.separation < 0.0) {
    throw ArgumentError("classification separation must be non-negative");
  }
  // Means are a pure function of the config so every instance shares them.
  Rng rng = Rng::stream(cfg.means_seed ^ 0x4D45414E53ULL,
                        (static_cast<std::uint64_t>(cfg.classes) << 32) |
                            cfg.feature_dim);
  const double radius = cfg.separation / std::sqrt(2.0);
  std::vector<Array> means;
  means.reserve(cfg.classes);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    Array dir({cfg.feature_dim});
    double norm = 0.0;
    for (auto& v : dir.data()) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) norm = 1.0;
    for (auto& v : dir.data()) v *= radius / norm;
    means.push_back(std::move(dir));
  }
  return means;
}

TaskInstance gen_classification(const ClassifyConfig& cfg, Rng& rng) {
  const std::vector<Array> means = class_means(cfg);
  const std::size_t label = rng.below(cfg.classes);
  Array obs({cfg.feature_dim});
  for (std::size_t i = 0; i < cfg.feature_dim; ++i) {
    obs[i] = means[label][i] + rng.normal();
  }
  TaskInstance inst;
  inst.kind = TaskKind::kClassify;
  inst.observation = std::move(obs);
  inst.action_count = cfg.classes;
  inst.truth = ClassifyTruth{label};
  return inst;
}

TaskInstance gen_correlated(const CorrelatedConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.actions;
  if (n < 2) throw ArgumentError("correlated task requires at least 2 actions");
  if (cfg.correlation_length < 0.0) {
    throw ArgumentError("correlation length must be non-negative");
  }
  if (!(cfg.feasible_fraction > 0.0 && cfg.feasible_fraction < 1.0)) {
    throw ArgumentError("feasible fraction must lie strictly inside (0,1)");
  }

  // Circular smoothing weights by ring distance, normalized to keep the
  // smoothed field at unit marginal variance.
  std::vector<double> kernel(n, 0.0);
  if (cfg.correlation_length == 0.0) {
    kernel[0] = 1.0;
  } else {
    double sq = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const double ring = static_cast<double>(std::min(d, n - d));
      kernel[d] = std::exp(-ring * ring /
                           (2.0 * cfg.correlation_length * cfg.correlation_length));
      sq += kernel[d] * kernel[d];
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& w : kernel) w *= inv;
  }

  const double threshold = standard_normal_quantile(1.0 - cfg.feasible_fraction);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> latent(n);
    for (auto& z : latent) z = rng.normal();
    Array field({n});
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += kernel[i >= j ? i - j : j - i] * latent[j];
      }
      field[i] = acc;
    }

    CostTable costs;
    costs.costs.resize(n);
    bool any_feasible = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (field[i] > threshold) {
        const double ring = static_cast<double>(std::min(i, n - i));
        costs.costs[i] = cfg.base_cost + cfg.distance_cost * ring;
        any_feasible = true;
      } else {
        costs.costs[i] = kInf;
      }
    }
    if (!any_feasible) continue;  // re-sample until the feasible set is non-empty

    Array obs({n});
    for (std::size_t i = 0; i < n; ++i) {
      obs[i] = field[i] + cfg.noise * rng.normal();
    }
    TaskInstance inst;
    inst.kind = TaskKind::kCorrelated;
    inst.observation = std::move(obs);
    inst.action_count = n;
    inst.truth = CorrelatedTruth{std::move(costs)};
    return inst;
  }
  throw GenerationError("correlated task: no feasible action after 10000 attempts");
}

namespace {

GridMap carve_rooms(const LocalizeConfig& cfg, Rng& rng) {
  GridMap map;
  map.width = cfg.width;
  map.height = cfg.height;
  map.occupancy.assign(cfg.width * cfg.height, 1);
  auto carve = [&](std::size_t r, std::size_t c) {
    if (r >= 1 && r + 1 < cfg.height && c >= 1 && c + 1 < cfg.width) {
      map.occupancy[r * cfg.width + c] = 0;
    }
  };

  std::vector<std::pair<std::size_t, std::size_t>> centers;
  for (std::size_t room = 0; room < cfg.rooms; ++room) {
    const std::size_t h = cfg.min_room + rng.below(cfg.max_room - cfg.min_room + 1);
    const std::size_t w = cfg.min_room + rng.below(cfg.max_room - cfg.min_room + 1);
    const std::size_t r0 = 1 + rng.below(std::max<std::size_t>(cfg.height - h - 1, 1));
    const std::size_t c0 = 1 + rng.below(std::max<std::size_t>(cfg.width - w - 1, 1));
    for (std::size_t r = r0; r < r0 + h; ++r) {
      for (std::size_t c = c0; c < c0 + w; ++c) carve(r, c);
    }
    centers.emplace_back(r0 + h / 2, c0 + w / 2);
  }
  // L-shaped corridors between successive room centers keep the map connected.
  for (std::size_t i = 1; i < centers.size(); ++i) {
    auto [r1, c1] = centers[i - 1];
    auto [r2, c2] = centers[i];
    for (std::size_t c = std::min(c1, c2); c <= std::max(c1, c2); ++c) carve(r1, c);
    for (std::size_t r = std::min(r1, r2); r <= std::max(r1, r2); ++r) carve(r, c2);
  }
  return map;
}

}  // namespace

TaskInstance gen_localization(const LocalizeConfig& cfg, Rng& rng) {
  if (cfg.height < 8 || cfg.width < 8) {
    throw ArgumentError("localization maps must be at least 8x8");
  }
  if (cfg.beams < 4) throw ArgumentError("localization requires at least 4 beams");
  if (cfg.rooms < 1 || cfg.min_room < 1 || cfg.max_room < cfg.min_room) {
    throw ArgumentError("invalid room generator parameters");
  }

  GridMap map = carve_rooms(cfg, rng);
  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < map.occupancy.size(); ++i) {
    if (map.occupancy[i] == 0) free_cells.push_back(i);
  }
  if (free_cells.empty()) {
    throw GenerationError("localization map generator produced no free cells");
  }
  const std::size_t cell = free_cells[rng.below(free_cells.size())];
  const std::size_t row = cell / cfg.width;
  const std::size_t col = cell % cfg.width;

  Array scan = raycast(map, row, col, 0.0, cfg.beams);
  const double scale = static_cast<double>(std::max(cfg.width, cfg.height));
  Array obs({cfg.width * cfg.height + cfg.beams});
  for (std::size_t i = 0; i < map.occupancy.size(); ++i) {
    obs[i] = map.occupancy[i] ? 1.0 : 0.0;
  }
  for (std::size_t b = 0; b < cfg.beams; ++b) {
    const double noisy = scan[b] + cfg.range_noise * rng.normal();
    obs[map.occupancy.size() + b] = std::max(noisy, 0.0) / scale;
  }

  TaskInstance inst;
  inst.kind = TaskKind::kLocalize;
  inst.observation = std::move(obs);
  inst.action_count = cfg.width * cfg.height;
  inst.truth = LocalizeTruth{std::move(map), row, col};
  return inst;
}

Array raycast(const GridMap& map, std::size_t row, std::size_t col,
              double heading, std::size_t beams) {
  if (beams == 0) throw ArgumentError("raycast: need at least one beam");
  if (row >= map.height || col >= map.width) {
    throw ArgumentError("raycast: pose outside the map");
  }
  if (map.occupied(row, col)) {
    throw ArgumentError("raycast: pose must be on a free cell");
  }

  constexpr double kTieEps = 1e-9;
  Array ranges({beams});
  for (std::size_t b = 0; b < beams; ++b) {
    const double theta =
        heading + 2.0 * M_PI * static_cast<double>(b) / static_cast<double>(beams);
    const double dy = std::sin(theta);  // row direction
    const double dx = std::cos(theta);  // col direction

    long ci = static_cast<long>(row), cj = static_cast<long>(col);
    const long stepi = dy > 0.0 ? 1 : -1;
    const long stepj = dx > 0.0 ? 1 : -1;
    const double ady = std::abs(dy), adx = std::abs(dx);
    double tmax_i = ady > 0.0 ? 0.5 / ady : kInf;
    double tmax_j = adx > 0.0 ? 0.5 / adx : kInf;
    const double tdelta_i = ady > 0.0 ? 1.0 / ady : kInf;
    const double tdelta_j = adx > 0.0 ? 1.0 / adx : kInf;

    long hit_r = -1, hit_c = -1;
    const std::size_t max_steps = 4 * (map.width + map.height);
    for (std::size_t step = 0; step < max_steps; ++step) {
      if (std::isfinite(tmax_i) && std::isfinite(tmax_j) &&
          std::abs(tmax_i - tmax_j) <= kTieEps) {
        // Exact corner crossing: both flanking cells touch the ray here and
        // their centers are equidistant from the pose.
        const long ri = ci + stepi, rj = cj + stepj;
        if (map.occupied(static_cast<std::size_t>(ri), static_cast<std::size_t>(cj))) {
          hit_r = ri;
          hit_c = cj;
          break;
        }
        if (map.occupied(static_cast<std::size_t>(ci), static_cast<std::size_t>(rj))) {
          hit_r = ci;
          hit_c = rj;
          break;
        }
        ci = ri;
        cj = rj;
        tmax_i += tdelta_i;
        tmax_j += tdelta_j;
      } else if (tmax_i < tmax_j) {
        ci += stepi;
        tmax_i += tdelta_i;
      } else {
        cj += stepj;
        tmax_j += tdelta_j;
      }
      if (ci < 0 || cj < 0 || ci >= static_cast<long>(map.height) ||
          cj >= static_cast<long>(map.width)) {
        throw GenerationError("raycast: ray escaped the map (open boundary?)");
      }
      if (map.occupied(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj))) {
        hit_r = ci;
        hit_c = cj;
        break;
      }
    }
    if (hit_r < 0) {
      throw GenerationError("raycast: no occupied cell within traversal budget");
    }
    const double dr = static_cast<double>(hit_r) - static_cast<double>(row);
    const double dc = static_cast<double>(hit_c) - static_cast<double>(col);
    ranges[b] = std::sqrt(dr * dr + dc * dc);
  }
  return ranges;
}

AssessmentOutcome assess(const TaskInstance& instance, std::size_t action,
                         const AssessConfig& cfg) {
  if (action >= instance.action_count) {
    throw ArgumentError("assess: action index out of range");
  }
  switch (instance.kind) {
    case TaskKind::kClassify: {
      const auto& truth = std::get<ClassifyTruth>(instance.truth);
      return AssessmentOutcome{action == truth.label, std::nullopt};
    }
    case TaskKind::kCorrelated: {
      const auto& truth = std::get<CorrelatedTruth>(instance.truth);
      const bool ok = truth.costs.feasible(action);
      return AssessmentOutcome{ok, truth.costs.costs[action]};
    }
    case TaskKind::kLocalize: {
      if (cfg.neighborhood % 2 == 0) {
        throw ArgumentError("assess: localization neighborhood k must be odd");
      }
      const auto& truth = std::get<LocalizeTruth>(instance.truth);
      const long half = static_cast<long>(cfg.neighborhood / 2);
      const long r = static_cast<long>(action / truth.map.width);
      const long c = static_cast<long>(action % truth.map.width);
      const bool ok = std::labs(r - static_cast<long>(truth.row)) <= half &&
                      std::labs(c - static_cast<long>(truth.col)) <= half;
      return AssessmentOutcome{ok, std::nullopt};
    }
  }
  throw ArgumentError("assess: unknown task kind");
}

Array bc_target(const TaskInstance& instance, const AssessConfig& cfg) {
  switch (instance.kind) {
    case TaskKind::kClassify: {
      const auto& truth = std::get<ClassifyTruth>(instance.truth);
      Array t({instance.action_count});
      t[truth.label] = 1.0;
      return t;
    }
    case TaskKind::kCorrelated: {
      // softmax(-cost): infeasible actions carry zero weight.
      const auto& truth = std::get<CorrelatedTruth>(instance.truth);
      double min_cost = kInf;
      for (double c : truth.costs.costs) min_cost = std::min(min_cost, c);
      Array t({instance.action_count});
      double sum = 0.0;
      for (std::size_t i = 0; i < instance.action_count; ++i) {
        const double c = truth.costs.costs[i];
        t[i] = std::isfinite(c) ? std::exp(min_cost - c) : 0.0;
        sum += t[i];
      }
      for (auto& v : t.data()) v /= sum;
      return t;
    }
    case TaskKind::kLocalize: {
      const auto& truth = std::get<LocalizeTruth>(instance.truth);
      const double sigma = static_cast<double>(cfg.neighborhood) / 3.0;
      Array t({instance.action_count});
      double sum = 0.0;
      for (std::size_t r = 0; r < truth.map.height; ++r) {
        for (std::size_t c = 0; c < truth.map.width; ++c) {
          const double dr = static_cast<double>(r) - static_cast<double>(truth.row);
          const double dc = static_cast<double>(c) - static_cast<double>(truth.col);
          const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
          t[truth.map.cell_index(r, c)] = v;
          sum += v;
        }
      }
      for (auto& v : t.data()) v /= sum;
      return t;
    }
  }
  throw ArgumentError("bc_target: unknown task kind");
}

TaskSpec default_task(TaskKind kind) {
  TaskSpec spec;
  spec.kind = kind;
  switch (kind) {
    case TaskKind::kClassify:
      spec.memory_mode = MemoryMode::kNormalized;
      break;
    case TaskKind::kCorrelated:
      spec.memory_mode = MemoryMode::kBinary;
      break;
    case TaskKind::kLocalize:
      spec.memory_mode = MemoryMode::kBinary;
      break;
  }
  return spec;
}

TaskInstance generate(const TaskSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case TaskKind::kClassify: return gen_classification(spec.classify, rng);
    case TaskKind::kCorrelated: return gen_correlated(spec.correlated, rng);
    default: return gen_localization(spec.localize, rng);
  }
}

std::size_t task_action_count(const TaskSpec& spec) {
  switch (spec.kind) {
    case TaskKind::kClassify: return spec.classify.classes;
    case TaskKind::kCorrelated: return spec.correlated.actions;
    default: return spec.localize.width * spec.localize.height;
  }
}

std::size_t task_obs_dim(const TaskSpec& spec) {
  switch (spec.kind) {
    case TaskKind::kClassify: return spec.classify.feature_dim;
    case TaskKind::kCorrelated: return spec.correlated.actions;
    default:
      return spec.localize.width * spec.localize.height + spec.localize.beams;
  }
}

OracleFn make_oracle(const TaskInstance& instance, const AssessConfig& cfg) {
  return [&instance, cfg](std::size_t action) {
    return assess(instance, action, cfg);
  };
}

EpisodeTrace run_episode(DecisionPolicy& policy, const TaskInstance& instance,
                         const AssessConfig& assess_cfg,
                         const EpisodeConfig& cfg, Rng& rng) {
  return run_episode(policy, instance.observation, instance.action_count,
                     make_oracle(instance, assess_cfg), cfg, rng);
}

}  // namespace redecide
