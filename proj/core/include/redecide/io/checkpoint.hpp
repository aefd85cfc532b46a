#pragma once

#include <string>

#include "redecide/policy.hpp"

namespace redecide {

// Checkpoint container: magic + version, the architecture, a config echo,
// then named parameter blobs (trainable flag, shape, row-major f64 data) in
// sorted section/name order. Save -> load -> save is byte-identical.
struct Checkpoint {
  PolicyWeights weights;
  std::string config_echo;
};

std::string encode_checkpoint(const PolicyWeights& weights,
                              const std::string& config_echo);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const PolicyWeights& weights,
                     const std::string& config_echo);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace redecide
