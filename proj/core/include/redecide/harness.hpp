#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "redecide/io/kv.hpp"
#include "redecide/tasks.hpp"
#include "redecide/train.hpp"

namespace redecide {

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // --seed, overrides [run] seed
  std::string out_dir = ".";
  std::size_t threads = 1;
  bool quiet = false;
};

// Dispatches one CLI command ("gen-data", "train-bc", "train-fa", "eval",
// "sweep", "plot"). Throws ConfigError for schema problems, DependencyError
// for missing input artifacts and IoError for filesystem failures; the CLI
// maps those to exit codes 2, 3 and 4.
void run_command(const std::string& command, const RunOptions& opts);

// Individual commands, usable directly from tests with a parsed config.
void cmd_gen_data(const KeyValueConfig& cfg, const RunOptions& opts);
void cmd_train_bc(const KeyValueConfig& cfg, const RunOptions& opts);
void cmd_train_fa(const KeyValueConfig& cfg, const RunOptions& opts);
void cmd_eval(const KeyValueConfig& cfg, const RunOptions& opts);
void cmd_sweep(const KeyValueConfig& cfg, const RunOptions& opts);
void cmd_plot(const KeyValueConfig& cfg, const RunOptions& opts);

// Shared config readers.
TaskSpec parse_task(const KeyValueConfig& cfg);
TrainConfig parse_train(const KeyValueConfig& cfg, TaskKind kind,
                        std::uint64_t master_seed);
std::uint64_t resolve_seed(const KeyValueConfig& cfg, const RunOptions& opts);

// Stable derived seed for a named role within a run.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index);

}  // namespace redecide
