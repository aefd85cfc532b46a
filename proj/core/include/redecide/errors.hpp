#pragma once

#include <stdexcept>
#include <string>

namespace redecide {

// Error taxonomy shared across the library. The CLI maps ConfigError to exit
// code 2, DependencyError to 3 and IoError to 4; everything else is 1.

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A selector was asked to pick from an all-zero failure memory.
struct ExhaustedActionsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A policy broke the episode contract (out-of-range or repeated action).
struct ProtocolViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An optimizer step saw trainable parameters without matching gradients.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A gradient-check probe produced a non-finite loss.
struct ProbeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace redecide
