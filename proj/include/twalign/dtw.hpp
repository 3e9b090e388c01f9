#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "twalign/matrix.hpp"

namespace twalign {

// Monotone alignment path from (1,1) to (n,m); indices are 1-based as in the
// DP recursions, each step one of {(+1,0),(0,+1),(+1,+1)}.
struct AlignmentPath {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
};

// Cumulative cost table. r is stored (n+1)x(m+1): r(0,0) = 0 and
// r(i,0) = r(0,j) = +inf for i,j >= 1, so that r(1,1) = delta(1,1). The
// interior entry r(i,j) corresponds to the 1-based recursion cell (i,j).
struct DpTables {
  Matrix r;
  double gamma = 0.0;
  static constexpr const char* boundary_convention =
      "r(0,0)=0; r(i,0)=r(0,j)=+inf for i,j>=1";
};

struct DtwResult {
  double cost = 0.0;
  DpTables tables;
};

struct BruteForceResult {
  double cost = 0.0;
  AlignmentPath best_path;
};

inline constexpr std::size_t kBruteForceGuard = 12;

// Exhaustive minimization over all monotone paths; ties broken by the
// lexicographically smallest path. Sizes above kBruteForceGuard raise
// SizeError.
BruteForceResult dtw_bruteforce(const Matrix& delta);

// Hard-min dynamic program (gamma = 0 recursion).
DtwResult dtw(const Matrix& delta);

// Soft-min dynamic program, gamma > 0.
DtwResult softdtw_forward(const Matrix& delta, double gamma);

// Gradient matrix M with mu_{i,j} = d r(n,m) / d r(i,j), which for the plain
// DP layer equals d r(n,m) / d delta(i,j). Reverse recursion seeded with
// mu(n,m) = 1; out-of-range mu are zero.
Matrix softdtw_backward(const Matrix& delta, const DpTables& tables, double gamma);

}  // namespace twalign
