#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redecide/tasks.hpp"

namespace redecide {

// Self-describing instance container. The header carries the task spec, the
// generation seed, the record count and a config echo; records follow in
// fixed little-endian layout, so regeneration with the same (config, seed)
// is byte-identical.
struct Dataset {
  TaskSpec task;
  std::uint64_t seed = 0;
  std::string config_echo;
  std::vector<TaskInstance> instances;
};

Dataset generate_dataset(const TaskSpec& task, std::size_t count,
                         std::uint64_t seed, std::string config_echo);

std::string encode_dataset(const Dataset& ds);
Dataset decode_dataset(const std::string& bytes);

void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace redecide
