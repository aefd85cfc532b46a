#include "redecide/io/dataset.hpp"

#include <fstream>

#include "redecide/io/binio.hpp"

namespace redecide {

namespace {
constexpr char kMagic[4] = {'R', 'D', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_task_spec(std::string& out, const TaskSpec& t) {
  put_u8(out, static_cast<std::uint8_t>(t.kind));
  put_u8(out, static_cast<std::uint8_t>(t.memory_mode));
  put_u64(out, t.classify.classes);
  put_u64(out, t.classify.feature_dim);
  put_f64(out, t.classify.separation);
  put_u64(out, t.classify.means_seed);
  put_u64(out, t.correlated.actions);
  put_f64(out, t.correlated.correlation_length);
  put_f64(out, t.correlated.feasible_fraction);
  put_f64(out, t.correlated.noise);
  put_f64(out, t.correlated.base_cost);
  put_f64(out, t.correlated.distance_cost);
  put_u64(out, t.localize.height);
  put_u64(out, t.localize.width);
  put_u64(out, t.localize.beams);
  put_f64(out, t.localize.range_noise);
  put_u64(out, t.localize.rooms);
  put_u64(out, t.localize.min_room);
  put_u64(out, t.localize.max_room);
  put_u64(out, t.assess_cfg.neighborhood);
}

TaskSpec get_task_spec(BinReader& in) {
  TaskSpec t;
  t.kind = static_cast<TaskKind>(in.u8());
  t.memory_mode = static_cast<MemoryMode>(in.u8());
  t.classify.classes = in.u64();
  t.classify.feature_dim = in.u64();
  t.classify.separation = in.f64();
  t.classify.means_seed = in.u64();
  t.correlated.actions = in.u64();
  t.correlated.correlation_length = in.f64();
  t.correlated.feasible_fraction = in.f64();
  t.correlated.noise = in.f64();
  t.correlated.base_cost = in.f64();
  t.correlated.distance_cost = in.f64();
  t.localize.height = in.u64();
  t.localize.width = in.u64();
  t.localize.beams = in.u64();
  t.localize.range_noise = in.f64();
  t.localize.rooms = in.u64();
  t.localize.min_room = in.u64();
  t.localize.max_room = in.u64();
  t.assess_cfg.neighborhood = in.u64();
  return t;
}

}  // namespace

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path);
}

Dataset generate_dataset(const TaskSpec& task, std::size_t count,
                         std::uint64_t seed, std::string config_echo) {
  if (count == 0) throw ArgumentError("generate_dataset: count must be >= 1");
  Dataset ds;
  ds.task = task;
  ds.seed = seed;
  ds.config_echo = std::move(config_echo);
  ds.instances.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, i);
    ds.instances.push_back(generate(task, rng));
  }
  return ds;
}

std::string encode_dataset(const Dataset& ds) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_task_spec(out, ds.task);
  put_u64(out, ds.seed);
  put_string(out, ds.config_echo);
  put_u64(out, ds.instances.size());
  for (const auto& inst : ds.instances) {
    for (double v : inst.observation.data()) put_f64(out, v);
    switch (inst.kind) {
      case TaskKind::kClassify:
        put_u64(out, std::get<ClassifyTruth>(inst.truth).label);
        break;
      case TaskKind::kCorrelated: {
        const auto& truth = std::get<CorrelatedTruth>(inst.truth);
        for (double c : truth.costs.costs) put_f64(out, c);
        break;
      }
      case TaskKind::kLocalize: {
        const auto& truth = std::get<LocalizeTruth>(inst.truth);
        for (std::uint8_t cell : truth.map.occupancy) put_u8(out, cell);
        put_u64(out, truth.row);
        put_u64(out, truth.col);
        break;
      }
    }
  }
  return out;
}

Dataset decode_dataset(const std::string& bytes) {
  BinReader in(bytes, "dataset");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(in.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("dataset: bad magic (not a dataset file)");
  }
  const std::uint32_t version = in.u32();
  if (version != kVersion) {
    throw IoError("dataset: unsupported format version " + std::to_string(version));
  }
  Dataset ds;
  ds.task = get_task_spec(in);
  ds.seed = in.u64();
  ds.config_echo = in.str();
  const std::uint64_t count = in.u64();

  const std::size_t obs_dim = task_obs_dim(ds.task);
  const std::size_t actions = task_action_count(ds.task);
  for (std::uint64_t i = 0; i < count; ++i) {
    TaskInstance inst;
    inst.kind = ds.task.kind;
    inst.action_count = actions;
    Array obs({obs_dim});
    for (std::size_t k = 0; k < obs_dim; ++k) obs[k] = in.f64();
    inst.observation = std::move(obs);
    switch (ds.task.kind) {
      case TaskKind::kClassify:
        inst.truth = ClassifyTruth{in.u64()};
        break;
      case TaskKind::kCorrelated: {
        CorrelatedTruth truth;
        truth.costs.costs.resize(actions);
        for (auto& c : truth.costs.costs) c = in.f64();
        inst.truth = std::move(truth);
        break;
      }
      case TaskKind::kLocalize: {
        LocalizeTruth truth;
        truth.map.width = ds.task.localize.width;
        truth.map.height = ds.task.localize.height;
        truth.map.occupancy.resize(truth.map.width * truth.map.height);
        for (auto& cell : truth.map.occupancy) cell = in.u8();
        truth.row = in.u64();
        truth.col = in.u64();
        inst.truth = std::move(truth);
        break;
      }
    }
    ds.instances.push_back(std::move(inst));
  }
  in.expect_exhausted();
  return ds;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  write_file_bytes(path, encode_dataset(ds));
}

Dataset read_dataset(const std::string& path) {
  return decode_dataset(read_file_bytes(path));
}

}  // namespace redecide
