#pragma once

#include <stdexcept>
#include <string>

namespace fgof {

// Bad tuning parameters or impossible requests (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable files, ragged rows, incompatible inputs (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two curves live on incompatible discretizations.
struct GridMismatchError : DataError {
  using DataError::DataError;
};

// A variance estimate vanished, e.g. all residuals are exactly zero
// (CLI exit code 4).
struct DegenerateStatisticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fgof
