#include "twalign/augment.hpp"

#include <algorithm>
#include <cmath>

namespace twalign {

std::string to_string(PermStrategy s) {
  switch (s) {
    case PermStrategy::similarity: return "similarity";
    case PermStrategy::uniform: return "uniform";
    default: return "inverse";
  }
}

PermStrategy strategy_from_string(const std::string& s) {
  if (s == "similarity" || s == "ours" || s == "A") return PermStrategy::similarity;
  if (s == "uniform" || s == "B") return PermStrategy::uniform;
  if (s == "inverse" || s == "C") return PermStrategy::inverse;
  throw ArgumentError("unknown permutation strategy: " + s);
}

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::uint64_t factorial_sat(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f = sat_mul(f, k);
  return f;
}

}  // namespace

std::uint64_t count_windowed_permutations(std::size_t n, std::size_t w) {
  if (n == 0) return 1;
  if (w + 1 >= n) return factorial_sat(n);
  // With w < n-1 any permutation of the first w+1 positions among the first
  // w+1 values is admissible, so the count is at least (w+1)!. When the
  // window is too wide for the bitmask below that bound is already ~4e7,
  // far past any sane enumeration guard, so the count saturates.
  const std::size_t width = 2 * w + 1;
  if (width > 19) return UINT64_MAX;

  // Position-by-position DP. Placing position k (0-based) consumes a value
  // in [k-w, k+w]; every value below k-w must already be used. The state
  // mask tracks usage of the window [k-w, k+w], bit v-(k-w) for value v.
  const std::uint64_t full = (std::uint64_t{1} << width) - 1;
  std::vector<std::uint64_t> cur(std::size_t{1} << width, 0);
  std::vector<std::uint64_t> nxt(std::size_t{1} << width, 0);
  // initial window for k=0 is [-w, w]; negative slots marked used
  const std::uint64_t pad = (std::uint64_t{1} << w) - 1;
  cur[pad] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(nxt.begin(), nxt.end(), 0);
    const long lo = static_cast<long>(k) - static_cast<long>(w);
    for (std::uint64_t mask = 0; mask <= full; ++mask) {
      const std::uint64_t ways = cur[mask];
      if (!ways) continue;
      for (std::size_t b = 0; b < width; ++b) {
        const long value = lo + static_cast<long>(b);
        if (value < 0 || value >= static_cast<long>(n)) continue;
        if (mask & (std::uint64_t{1} << b)) continue;
        std::uint64_t nmask = mask | (std::uint64_t{1} << b);
        // slide the window by one for position k+1; the departing slot
        // (value k-w) must be used by now
        if (!(nmask & 1)) continue;
        nmask >>= 1;
        if (k + 1 + w >= n) nmask |= std::uint64_t{1} << (width - 1);
        std::uint64_t& slot = nxt[nmask];
        slot = slot > UINT64_MAX - ways ? UINT64_MAX : slot + ways;
      }
    }
    std::swap(cur, nxt);
  }
  return cur[full];
}

std::vector<Permutation> windowed_permutations(std::size_t n, std::size_t w,
                                               std::uint64_t guard) {
  if (n == 0) throw ArgumentError("windowed_permutations: n must be >= 1");
  const std::uint64_t count = count_windowed_permutations(n, w);
  if (count > guard)
    throw SizeError("windowed_permutations: |T(n,w)| = " +
                        (count == UINT64_MAX ? std::string("(saturated)")
                                             : std::to_string(count)) +
                        " exceeds guard " + std::to_string(guard),
                    count);
  std::vector<Permutation> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> map(n);
  std::vector<bool> used(n, false);
  // ascending candidate order at each position gives lexicographic output
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      out.emplace_back(map);
      return;
    }
    const std::size_t lo = k >= w ? k - w : 0;
    const std::size_t hi = std::min(n - 1, k + w);
    for (std::size_t v = lo; v <= hi; ++v) {
      if (used[v]) continue;
      used[v] = true;
      map[k] = v;
      self(self, k + 1);
      used[v] = false;
    }
  };
  rec(rec, 0);
  return out;
}

PermutationDistribution permutation_distribution_from_selfsim(
    const Matrix& selfsim, std::size_t w, double tau, PermStrategy strategy,
    std::uint64_t guard) {
  if (!(tau > 0.0))
    throw ArgumentError("permutation_distribution: tau must be > 0");
  if (selfsim.rows() != selfsim.cols())
    throw ShapeError("permutation_distribution: self-similarity not square");
  const std::size_t n = selfsim.rows();

  PermutationDistribution dist;
  dist.permutations = windowed_permutations(n, w, guard);
  dist.tau = tau;
  dist.window = w;
  dist.length = n;

  const std::size_t count = dist.permutations.size();
  std::vector<double> logits(count, 0.0);
  if (strategy != PermStrategy::uniform) {
    Matrix permuted(n, n);
    for (std::size_t p = 0; p < count; ++p) {
      const Permutation& pi = dist.permutations[p];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          permuted(i, j) = selfsim(pi(i), pi(j));
      const double d2 = frobenius_sq(selfsim, permuted);
      logits[p] = (strategy == PermStrategy::similarity ? -d2 : d2) / tau;
    }
  }
  const double shift = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  dist.probabilities.resize(count);
  for (std::size_t p = 0; p < count; ++p) {
    dist.probabilities[p] = std::exp(logits[p] - shift);
    z += dist.probabilities[p];
  }
  for (double& q : dist.probabilities) q /= z;
  return dist;
}

PermutationDistribution permutation_distribution(const FeatureSequence& x,
                                                 std::size_t w, double tau,
                                                 DistanceMeasure measure,
                                                 PermStrategy strategy,
                                                 std::uint64_t guard) {
  return permutation_distribution_from_selfsim(
      self_similarity(x, measure).values, w, tau, strategy, guard);
}

const Permutation& sample_permutation(const PermutationDistribution& dist,
                                      RngStream& rng) {
  if (dist.permutations.empty())
    throw ArgumentError("sample_permutation: empty distribution");
  const double u = uniform01(rng);
  double cdf = 0.0;
  for (std::size_t p = 0; p < dist.probabilities.size(); ++p) {
    cdf += dist.probabilities[p];
    if (u < cdf) return dist.permutations[p];
  }
  return dist.permutations.back();
}

AugmentedPair augment_pair(const FeatureSequence& x, const FeatureSequence& y,
                           std::size_t w, double tau, DistanceMeasure measure,
                           RngStream& rng, PermStrategy strategy) {
  const auto dx = permutation_distribution(x, w, tau, measure, strategy);
  const auto dy = permutation_distribution(y, w, tau, measure, strategy);
  Permutation pix = sample_permutation(dx, rng);
  Permutation piy = sample_permutation(dy, rng);
  return {apply_permutation(x, pix), apply_permutation(y, piy), std::move(pix),
          std::move(piy)};
}

}  // namespace twalign
