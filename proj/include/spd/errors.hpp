#pragma once

#include <stdexcept>
#include <string>

namespace spd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct OverflowError : Error {
  using Error::Error;
};

struct QuadratureUnderResolved : Error {
  using Error::Error;
};

/// A conic combination sum_i alpha_i B_i failed the positive-definite check.
/// `index` is the offending datum in batch contexts, -1 otherwise.
struct DegenerateCombination : Error {
  explicit DegenerateCombination(const std::string& msg, long index = -1)
      : Error(msg), index(index) {}
  long index;
};

struct DegenerateStart : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace spd
