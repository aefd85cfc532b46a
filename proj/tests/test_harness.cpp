#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "redecide/errors.hpp"
#include "redecide/harness.hpp"
#include "redecide/io/binio.hpp"
#include "redecide/io/checkpoint.hpp"
#include "redecide/io/dataset.hpp"
#include "redecide/io/kv.hpp"
#include "redecide/io/plot.hpp"
#include "redecide/io/report.hpp"
#include "redecide/policy.hpp"

using namespace redecide;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("redecide_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path.string(), text);
}

RunOptions opts_for(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir.string();
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("key-value config: parsing, echo, strictness") {
  auto cfg = KeyValueConfig::parse_string(
      "# a comment\n"
      "[task]\n"
      "kind = classify   # trailing comment\n"
      "classes = 20\n"
      "\n"
      "[run]\n"
      "seed = 7\n");
  CHECK(cfg.get("task", "kind") == "classify");
  CHECK(cfg.get_u64("task", "classes") == 20);
  CHECK(cfg.get_u64("run", "seed") == 7);
  CHECK(cfg.get_or("task", "absent", "x") == "x");
  CHECK_THROWS_AS(cfg.get("task", "absent"), ConfigError);

  // canonical echo: sorted sections and keys, stable across reparses
  auto echo1 = cfg.echo();
  auto echo2 = KeyValueConfig::parse_string(echo1).echo();
  CHECK(echo1 == echo2);

  CHECK_THROWS_AS(KeyValueConfig::parse_string("key = 1\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("[a]\nnot a pair\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("[a]\nk = 1\nk = 2\n"), ConfigError);

  CHECK_THROWS_WITH_AS(cfg.require_known({"run.seed", "task.kind"}),
                       doctest::Contains("task.classes"), ConfigError);
}

TEST_CASE("dataset regeneration is byte-identical") {
  TaskSpec task = default_task(TaskKind::kCorrelated);
  task.correlated.actions = 12;
  auto a = encode_dataset(generate_dataset(task, 50, 99, "echo"));
  auto b = encode_dataset(generate_dataset(task, 50, 99, "echo"));
  CHECK(a == b);
  auto decoded = decode_dataset(a);
  CHECK(decoded.instances.size() == 50);
  CHECK(decoded.seed == 99);
  CHECK(decoded.config_echo == "echo");
  CHECK(decoded.task.correlated.actions == 12);
  // observations and truths survive the roundtrip exactly
  auto again = generate_dataset(task, 50, 99, "echo");
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(decoded.instances[i].observation == again.instances[i].observation);
  }
}

TEST_CASE("localize dataset roundtrip keeps maps and poses") {
  TaskSpec task = default_task(TaskKind::kLocalize);
  task.localize.height = 12;
  task.localize.width = 10;
  auto ds = generate_dataset(task, 5, 3, "");
  auto decoded = decode_dataset(encode_dataset(ds));
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& a = std::get<LocalizeTruth>(ds.instances[i].truth);
    const auto& b = std::get<LocalizeTruth>(decoded.instances[i].truth);
    CHECK(a.map.occupancy == b.map.occupancy);
    CHECK(a.row == b.row);
    CHECK(a.col == b.col);
  }
}

TEST_CASE("checkpoint save-load-save is a fixed point and rejects damage") {
  Rng rng(5);
  auto base = PolicyWeights::make_base(6, 9, 12, rng);
  auto fa = PolicyWeights::make_failure_aware(base, ArchKind::kFmp2,
                                              MemEncoderKind::kLearned,
                                              MemoryMode::kBinary, rng);
  const std::string bytes = encode_checkpoint(fa, "echo text");
  Checkpoint loaded = decode_checkpoint(bytes);
  CHECK(loaded.config_echo == "echo text");
  CHECK(loaded.weights.arch.kind == ArchKind::kFmp2);
  CHECK(encode_checkpoint(loaded.weights, loaded.config_echo) == bytes);

  // loaded weights behave identically
  Array obs = Array::zeros({6});
  Array q1 = policy_q_values(fa, obs, {0, 2});
  Array q2 = policy_q_values(loaded.weights, obs, {0, 2});
  CHECK(q1 == q2);

  CHECK_THROWS_WITH_AS(decode_checkpoint(bytes.substr(0, bytes.size() / 2)),
                       doctest::Contains("truncated"), IoError);
  std::string wrong_version = bytes;
  wrong_version[4] = 9;  // bump the little-endian version field
  CHECK_THROWS_WITH_AS(decode_checkpoint(wrong_version),
                       doctest::Contains("version"), IoError);
  CHECK_THROWS_AS(decode_checkpoint("garbage"), IoError);
}

TEST_CASE("report csv has the exact column set and roundtrips") {
  ReportRow row;
  row.policy = "sp";
  row.task_label = "correlated@ell=5";
  row.config_hash = "00ff";
  row.seed = 3;
  row.metrics.episodes = 100;
  row.metrics.successes = 70;
  row.metrics.tsr = 0.7;
  row.metrics.tsr_ci = {0.6, 0.78};
  row.metrics.tns = 2.5;
  row.sweep_value = 5.0;

  ReportRow empty_row = row;
  empty_row.policy = "re";
  empty_row.metrics.tns.reset();
  empty_row.metrics.pc_recip.reset();

  const std::string csv = report_csv({row, empty_row});
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "policy,task,config-hash,seed,episodes,tsr,tsr_ci_lo,tsr_ci_hi,tns,pc_recip");
  auto rows = parse_report_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].policy == "sp");
  CHECK(rows[0].metrics.tsr == doctest::Approx(0.7));
  REQUIRE(rows[0].sweep_value.has_value());
  CHECK(*rows[0].sweep_value == doctest::Approx(5.0));
  CHECK(!rows[1].metrics.tns.has_value());

  const std::string json = report_json({row}, "echo");
  CHECK(json.find("\"tns\": 2.5") != std::string::npos);
  const std::string json_null = report_json({empty_row}, "echo");
  CHECK(json_null.find("\"tns\": null") != std::string::npos);
}

TEST_CASE("gen-data is deterministic and strict about keys") {
  auto dir = fresh_dir("gendata");
  auto cfg = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 10\n[data]\ncount = 20\n");
  auto opts = opts_for(dir);
  opts.seed = 5;
  cmd_gen_data(cfg, opts);
  auto bytes1 = read_file_bytes((dir / "dataset.rdd").string());
  cmd_gen_data(cfg, opts);
  auto bytes2 = read_file_bytes((dir / "dataset.rdd").string());
  CHECK(bytes1 == bytes2);
  auto ds = read_dataset((dir / "dataset.rdd").string());
  CHECK(ds.instances.size() == 20);
  CHECK(ds.config_echo.find("seed = 5") != std::string::npos);

  auto bad = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactionz = 10\n");
  CHECK_THROWS_WITH_AS(cmd_gen_data(bad, opts), doctest::Contains("task.actionz"),
                       ConfigError);
}

TEST_CASE("training pipeline end to end with byte-identical reruns") {
  auto dir = fresh_dir("pipeline");
  auto opts = opts_for(dir);
  opts.seed = 11;

  auto data_cfg = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 8\nnoise = 0.6\n"
      "[data]\ncount = 120\n");
  cmd_gen_data(data_cfg, opts);

  auto bc_cfg = KeyValueConfig::parse_string(
      "[train]\ndataset = dataset.rdd\nepochs = 4\nbatch_size = 16\n"
      "lr = 0.002\nembed_width = 16\n");
  cmd_train_bc(bc_cfg, opts);
  CHECK(fs::exists(dir / "bc.ckpt"));
  CHECK(fs::exists(dir / "bc_log.csv"));
  auto bc1 = read_file_bytes((dir / "bc.ckpt").string());
  cmd_train_bc(bc_cfg, opts);
  CHECK(read_file_bytes((dir / "bc.ckpt").string()) == bc1);

  auto fa_cfg = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 8\nnoise = 0.6\n"
      "[train]\nbase_checkpoint = bc.ckpt\narch = fmp2\nepisodes = 60\n"
      "batch_size = 8\nmin_buffer = 16\nlr = 0.002\n");
  cmd_train_fa(fa_cfg, opts);
  CHECK(fs::exists(dir / "fa.ckpt"));
  auto fa1 = read_file_bytes((dir / "fa.ckpt").string());
  cmd_train_fa(fa_cfg, opts);
  CHECK(read_file_bytes((dir / "fa.ckpt").string()) == fa1);

  // the frozen sections of the trained checkpoint equal the base's
  auto base = load_checkpoint((dir / "bc.ckpt").string());
  auto fa = load_checkpoint((dir / "fa.ckpt").string());
  for (const auto& [name, entry] : base.weights.obs_encoder) {
    CHECK(fa.weights.obs_encoder.at(name) == entry.value);
    CHECK(!fa.weights.obs_encoder.trainable(name));
  }

  auto eval_cfg = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 8\nnoise = 0.6\n"
      "[eval]\npolicies = re, lpre, sp, fmp2\nepisodes = 150\nseeds = 1, 2\n"
      "bc_checkpoint = bc.ckpt\nfmp2_checkpoint = fa.ckpt\n");
  cmd_eval(eval_cfg, opts);
  auto csv1 = read_file_bytes((dir / "report.csv").string());
  cmd_eval(eval_cfg, opts);
  CHECK(read_file_bytes((dir / "report.csv").string()) == csv1);
  auto rows = parse_report_csv(csv1);
  CHECK(rows.size() == 8);  // 4 policies x 2 seeds
  CHECK(fs::exists(dir / "report.json"));

  // missing checkpoint for a learned policy is a dependency error
  auto broken = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 8\nnoise = 0.6\n"
      "[eval]\npolicies = fmp1\nepisodes = 10\n");
  CHECK_THROWS_AS(cmd_eval(broken, opts), DependencyError);

  // action-set mismatch between checkpoint and task is a config error
  auto mismatched = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 9\nnoise = 0.6\n"
      "[eval]\npolicies = fmp2\nepisodes = 10\n"
      "fmp2_checkpoint = fa.ckpt\n");
  CHECK_THROWS_AS(cmd_eval(mismatched, opts), ConfigError);
}

TEST_CASE("sweep produces the full grid and plots regenerate from csv alone") {
  auto dir = fresh_dir("sweep");
  auto opts = opts_for(dir);
  opts.seed = 3;
  auto cfg = KeyValueConfig::parse_string(
      "[task]\nkind = correlated\nactions = 8\n"
      "[data]\ncount = 60\n"
      "[train]\nepochs = 2\nepisodes = 30\nbatch_size = 8\nmin_buffer = 8\n"
      "lr = 0.002\nembed_width = 12\n"
      "[sweep]\naxis = correlation_length\nvalues = 0, 2\n"
      "policies = sp, fmp1\nepisodes = 60\nplot = true\n");
  cmd_sweep(cfg, opts);
  auto rows = parse_report_csv(read_file_bytes((dir / "sweep.csv").string()));
  CHECK(rows.size() == 4);  // 2 values x 2 policies x 1 seed
  for (const auto& row : rows) CHECK(row.sweep_value.has_value());
  CHECK(fs::exists(dir / "sweep_tsr.svg"));

  // plot command rebuilds figures from the CSV only
  auto plot_cfg = KeyValueConfig::parse_string(
      "[plot]\ncsv = sweep.csv\nout_prefix = again\n");
  cmd_plot(plot_cfg, opts);
  CHECK(fs::exists(dir / "again_tsr.svg"));
  auto svg1 = read_file_bytes((dir / "sweep_tsr.svg").string());
  auto svg2 = read_file_bytes((dir / "again_tsr.svg").string());
  CHECK(svg1 == svg2);
}

TEST_CASE("cli maps error classes onto exit codes") {
  auto dir = fresh_dir("cli");
  write_text(dir / "good.cfg",
             "[task]\nkind = correlated\nactions = 6\n[data]\ncount = 10\n");
  write_text(dir / "bad.cfg",
             "[task]\nkind = correlated\nactionz = 6\n[data]\ncount = 10\n");
  write_text(dir / "dep.cfg",
             "[task]\nkind = correlated\nactions = 6\n"
             "[train]\nbase_checkpoint = nope.ckpt\n");

  const std::string cli = REDECIDE_CLI;
  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("gen-data --config " + (dir / "good.cfg").string() + " --out " +
            dir.string() + " --seed 4") == 0);
  CHECK(fs::exists(dir / "dataset.rdd"));
  CHECK(run("gen-data --config " + (dir / "bad.cfg").string() + " --out " +
            dir.string()) == 2);
  CHECK(run("train-fa --config " + (dir / "dep.cfg").string() + " --out " +
            dir.string()) == 3);
  CHECK(run("eval --config " + (dir / "missing.cfg").string()) == 4);
}

TEST_CASE("threaded eval matches single-threaded bytes") {
  auto dir = fresh_dir("threads");
  auto opts = opts_for(dir);
  opts.seed = 17;
  auto eval_cfg = KeyValueConfig::parse_string(
      "[task]\nkind = classify\nclasses = 6\nfeature_dim = 4\n"
      "[eval]\npolicies = re, sp\nepisodes = 200\n");
  cmd_eval(eval_cfg, opts);
  auto csv1 = read_file_bytes((dir / "report.csv").string());
  opts.threads = 3;
  cmd_eval(eval_cfg, opts);
  CHECK(read_file_bytes((dir / "report.csv").string()) == csv1);
}
