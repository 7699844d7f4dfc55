#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbd {

// Error taxonomy. Each family maps to one process exit code (see exit_code_for
// and the README table): config/usage -> 2, malformed data -> 3, I/O -> 4,
// non-finite numerics -> 5.

struct SbdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad flag values, infeasible model dimensions, inconsistent arguments.
struct ConfigError : SbdError {
  using SbdError::SbdError;
};

// Malformed input data: invalid UTF-8, bad vector files, bad checkpoints.
struct FormatError : SbdError {
  using SbdError::SbdError;
};

// Filesystem-level failures; message carries the path.
struct IoError : SbdError {
  using SbdError::SbdError;
};

// NaN/Inf where a finite value is required (diverged training, bad logits).
struct NumericError : SbdError {
  using SbdError::SbdError;
};

// Tensor/layer dimension mismatch. A ConfigError: shapes are decided by
// configuration, never by data.
struct ShapeError : ConfigError {
  using ConfigError::ConfigError;
};

// Operation invoked in the wrong order (e.g. backward before forward).
struct StateError : SbdError {
  using SbdError::SbdError;
};

inline int exit_code_for(const SbdError& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const FormatError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const NumericError*>(&e)) return 5;
  return 1;
}

}  // namespace sbd
