#pragma once

// Test-only oracles, kept independent of the library's DP code paths: the
// soft cost and visit masses are computed by enumerating every monotone
// path, and gradients are checked against central finite differences of
// whatever forward functional is under test.

#include <cmath>
#include <functional>
#include <vector>

#include "twalign/matrix.hpp"
#include "twalign/rng.hpp"
#include "twalign/sequence.hpp"

namespace oracles {

using twalign::Matrix;

inline void enumerate_paths(
    std::size_t n, std::size_t m,
    const std::function<void(const std::vector<std::pair<std::size_t, std::size_t>>&)>&
        visit) {
  std::vector<std::pair<std::size_t, std::size_t>> path{{0, 0}};
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (i == n - 1 && j == m - 1) {
      visit(path);
      return;
    }
    const std::pair<std::size_t, std::size_t> moves[3] = {
        {i, j + 1}, {i + 1, j}, {i + 1, j + 1}};
    for (const auto& [ni, nj] : moves) {
      if (ni >= n || nj >= m) continue;
      path.emplace_back(ni, nj);
      self(self, ni, nj);
      path.pop_back();
    }
  };
  rec(rec, 0, 0);
}

// -gamma log sum over paths of exp(-cost/gamma), shifted by the minimum
// path cost for stability.
inline double soft_cost_bruteforce(const Matrix& delta, double gamma) {
  std::vector<double> costs;
  enumerate_paths(delta.rows(), delta.cols(), [&](const auto& path) {
    double c = 0.0;
    for (const auto& [i, j] : path) c += delta(i, j);
    costs.push_back(c);
  });
  double lo = costs.front();
  for (double c : costs) lo = std::min(lo, c);
  if (gamma == 0.0) return lo;
  long double acc = 0.0L;
  for (double c : costs) acc += std::exp(-static_cast<long double>(c - lo) / gamma);
  return lo - gamma * static_cast<double>(std::log(acc));
}

// Per-cell soft visit probability: sum over paths through the cell of the
// path's Gibbs weight.
inline Matrix soft_visit_mass(const Matrix& delta, double gamma) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> paths;
  std::vector<long double> weights;
  enumerate_paths(delta.rows(), delta.cols(), [&](const auto& path) {
    paths.push_back(path);
  });
  long double lo = 0.0L;
  bool first = true;
  std::vector<long double> costs(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    long double c = 0.0L;
    for (const auto& [i, j] : paths[p]) c += delta(i, j);
    costs[p] = c;
    if (first || c < lo) lo = c;
    first = false;
  }
  long double z = 0.0L;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    weights.push_back(std::exp(-(costs[p] - lo) / gamma));
    z += weights.back();
  }
  Matrix mass(delta.rows(), delta.cols(), 0.0);
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (const auto& [i, j] : paths[p])
      mass(i, j) += static_cast<double>(weights[p] / z);
  return mass;
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double eps = 1e-5) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

// |a-b| relative to scale, with an absolute floor of 1 so tiny gradients
// are compared absolutely at the same tolerance.
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline Matrix random_matrix(std::size_t n, std::size_t m, twalign::RngStream& g,
                            double lo = 0.0, double hi = 2.0) {
  Matrix out(n, m);
  for (double& v : out.data()) v = lo + (hi - lo) * twalign::uniform01(g);
  return out;
}

inline twalign::FeatureSequence random_sequence(
    std::size_t n, std::size_t d, twalign::RngStream& g,
    twalign::Modality tag = twalign::Modality::clip) {
  std::vector<std::vector<double>> items(n);
  for (auto& it : items) it = twalign::unit_sphere(d, g);
  return twalign::FeatureSequence(std::move(items), tag);
}

}  // namespace oracles
