#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace twalign {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateVectorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PermutationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration or brute-force guard is exceeded; carries the
// offending count (saturated to UINT64_MAX when it cannot be represented).
struct SizeError : std::runtime_error {
  std::uint64_t count;
  SizeError(const std::string& msg, std::uint64_t c)
      : std::runtime_error(msg), count(c) {}
};

struct TrainingDivergedError : std::runtime_error {
  std::size_t step;
  TrainingDivergedError(const std::string& msg, std::size_t s)
      : std::runtime_error(msg), step(s) {}
};

}  // namespace twalign
