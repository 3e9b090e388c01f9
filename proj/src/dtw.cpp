#include "twalign/dtw.hpp"

#include <cmath>

#include "twalign/softmin.hpp"

namespace twalign {

namespace {

void check_finite(const Matrix& delta, const char* who) {
  for (std::size_t i = 0; i < delta.rows(); ++i)
    for (std::size_t j = 0; j < delta.cols(); ++j)
      if (std::isnan(delta(i, j)))
        throw NumericError(std::string(who) + ": NaN entry at (" +
                           std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ")");
}

DtwResult run_dp(const Matrix& delta, double gamma) {
  check_finite(delta, "dtw");
  const std::size_t n = delta.rows(), m = delta.cols();
  if (n == 0 || m == 0) throw ShapeError("dtw: empty matrix");
  Matrix r(n + 1, m + 1, kInf);
  r(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      r(i, j) = delta(i - 1, j - 1) +
                softmin3(r(i - 1, j), r(i, j - 1), r(i - 1, j - 1), gamma);
  const double cost = r(n, m);
  if (std::isnan(cost)) throw NumericError("dtw: NaN cost");
  return {cost, DpTables{std::move(r), gamma}};
}

}  // namespace

BruteForceResult dtw_bruteforce(const Matrix& delta) {
  check_finite(delta, "dtw_bruteforce");
  const std::size_t n = delta.rows(), m = delta.cols();
  if (n == 0 || m == 0) throw ShapeError("dtw_bruteforce: empty matrix");
  if (n > kBruteForceGuard || m > kBruteForceGuard)
    throw SizeError("dtw_bruteforce: size guard exceeded",
                    static_cast<std::uint64_t>(n) * m);

  BruteForceResult best;
  best.cost = kInf;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.reserve(n + m);

  // DFS visiting successors in the order (i,j+1), (i+1,j), (i+1,j+1)
  // generates paths in lexicographic order, so keeping the first strict
  // minimum yields the lexicographically smallest optimal path.
  auto rec = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
    acc += delta(i - 1, j - 1);
    stack.emplace_back(i, j);
    if (i == n && j == m) {
      if (acc < best.cost) {
        best.cost = acc;
        best.best_path.cells = stack;
      }
    } else {
      if (j < m) self(self, i, j + 1, acc);
      if (i < n) self(self, i + 1, j, acc);
      if (i < n && j < m) self(self, i + 1, j + 1, acc);
    }
    stack.pop_back();
  };
  rec(rec, 1, 1, 0.0);
  return best;
}

DtwResult dtw(const Matrix& delta) { return run_dp(delta, 0.0); }

DtwResult softdtw_forward(const Matrix& delta, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("softdtw_forward: gamma must be > 0");
  return run_dp(delta, gamma);
}

Matrix softdtw_backward(const Matrix& delta, const DpTables& tables,
                        double gamma) {
  const std::size_t n = delta.rows(), m = delta.cols();
  if (tables.r.rows() != n + 1 || tables.r.cols() != m + 1)
    throw ShapeError("softdtw_backward: table/delta shape mismatch");
  if (!(gamma > 0.0))
    throw ArgumentError("softdtw_backward: gamma must be > 0");
  const Matrix& r = tables.r;
  Matrix mu(n, m, 0.0);
  mu(n - 1, m - 1) = 1.0;
  // Reverse sweep; the weight of edge (i,j)->(i',j') is the soft-min
  // share of r(i,j) within (i',j')'s predecessor set, available in closed
  // form as exp((r(i',j') - delta(i',j') - r(i,j)) / gamma).
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      if (i == n - 1 && j == m - 1) continue;
      const double ri = r(i + 1, j + 1);  // r at 1-based (i+1,j+1) == cell (i,j)
      double acc = 0.0;
      if (i + 1 < n)
        acc += mu(i + 1, j) * std::exp((r(i + 2, j + 1) - delta(i + 1, j) - ri) / gamma);
      if (j + 1 < m)
        acc += mu(i, j + 1) * std::exp((r(i + 1, j + 2) - delta(i, j + 1) - ri) / gamma);
      if (i + 1 < n && j + 1 < m)
        acc += mu(i + 1, j + 1) *
               std::exp((r(i + 2, j + 2) - delta(i + 1, j + 1) - ri) / gamma);
      mu(i, j) = acc;
    }
  }
  return mu;
}

}  // namespace twalign
