#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "twalign/errors.hpp"

// Seeded random draws used across the synthetic generator, augmentation
// sampling and trainer. std::mt19937_64 supplies the bit stream; the
// real-valued transforms below are spelled out so that the same seed
// produces the same bytes on every platform (the std <random>
// distributions are implementation-defined).

namespace twalign {

using RngStream = std::mt19937_64;

inline double uniform01(RngStream& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one draw per call.
inline double gaussian(RngStream& g) {
  double u1 = 1.0 - uniform01(g);  // (0,1], keeps log finite
  double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(RngStream& g, std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_index: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

inline std::vector<double> unit_sphere(std::size_t dim, RngStream& g) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& c : v) {
      c = gaussian(g);
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : v) c *= inv;
  return v;
}

}  // namespace twalign
