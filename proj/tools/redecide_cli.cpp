// Command-line front end: dataset generation, the two training stages,
// evaluation, sweeps and plot regeneration. Exit codes: 0 ok, 2 config
// error, 3 dependency error, 4 I/O error, 1 anything else.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "redecide/errors.hpp"
#include "redecide/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"redecide: failure-aware re-decision policies for self-assessable tasks"};
  app.require_subcommand(1);

  redecide::RunOptions opts;
  std::uint64_t seed_flag = 0;

  const char* const commands[] = {"gen-data", "train-bc", "train-fa",
                                  "eval",     "sweep",    "plot"};
  const char* const descriptions[] = {
      "generate a dataset file from a task config",
      "behavior-clone the base policy from a dataset",
      "train a failure-aware policy from a base checkpoint",
      "evaluate policies and write CSV/JSON reports",
      "train-and-evaluate across a sweep axis",
      "regenerate SVG plots from a report CSV"};

  std::string chosen;
  for (std::size_t i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", opts.config_path, "run config file (key = value sections)")
        ->required();
    auto* seed_opt =
        sub->add_option("--seed", seed_flag, "master seed (overrides [run] seed)");
    sub->add_option("--out", opts.out_dir, "output directory (default .)");
    sub->add_option("--threads", opts.threads,
                    "evaluation fan-out threads (default 1)");
    sub->callback([&, i, seed_opt] {
      chosen = commands[i];
      if (seed_opt->count() > 0) opts.seed = seed_flag;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    redecide::run_command(chosen, opts);
  } catch (const redecide::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const redecide::DependencyError& e) {
    std::cerr << "dependency error: " << e.what() << "\n";
    return 3;
  } catch (const redecide::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
