#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "twalign/errors.hpp"

namespace twalign {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Soft minimum: -gamma * log sum_i exp(-a_i/gamma), exact min at gamma = 0.
// Computed in max-shifted form. +inf entries carry zero weight and drop out
// of the log-sum-exp; an all-infinite argument set yields +inf.
inline double softmin(std::span<const double> values, double gamma) {
  if (values.empty()) throw ArgumentError("softmin: empty value list");
  double lo = kInf;
  for (double v : values) {
    if (std::isnan(v)) throw NumericError("softmin: NaN input");
    lo = std::min(lo, v);
  }
  if (lo == kInf || gamma == 0.0) return lo;
  double acc = 0.0;
  for (double v : values) {
    if (v != kInf) acc += std::exp(-(v - lo) / gamma);
  }
  return lo - gamma * std::log(acc);
}

inline double softmin3(double a, double b, double c, double gamma) {
  const double vals[3] = {a, b, c};
  return softmin(vals, gamma);
}

}  // namespace twalign
