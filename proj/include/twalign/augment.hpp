#pragma once

#include <cstdint>
#include <vector>

#include "twalign/distance.hpp"
#include "twalign/rng.hpp"
#include "twalign/sequence.hpp"

namespace twalign {

inline constexpr std::uint64_t kPermutationGuard = 10000;

// Sampling strategies for the permutation target distribution:
//   similarity  probability decreasing in how much the permutation changes
//               the self-similarity matrix (the default),
//   uniform     flat over the windowed set,
//   inverse     sign-flipped exponent, favouring structure-breaking shuffles.
enum class PermStrategy { similarity, uniform, inverse };

std::string to_string(PermStrategy s);
PermStrategy strategy_from_string(const std::string& s);

// |T(n,w)| without enumerating; saturates at UINT64_MAX.
std::uint64_t count_windowed_permutations(std::size_t n, std::size_t w);

// Exact enumeration of all permutations with max displacement <= w, in
// lexicographic order. Counts above the guard raise SizeError carrying the
// computed count.
std::vector<Permutation> windowed_permutations(
    std::size_t n, std::size_t w, std::uint64_t guard = kPermutationGuard);

struct PermutationDistribution {
  std::vector<Permutation> permutations;  // T(n,w), lexicographic
  std::vector<double> probabilities;      // sums to 1
  double tau = 0.1;
  std::size_t window = 1;
  std::size_t length = 0;
};

// Softmax over T(n,w) of -|selfsim - permuted selfsim|_F^2 / tau (Frobenius
// norm; the permuted matrix is the row/column permutation of the original,
// no re-evaluation of the measure).
PermutationDistribution permutation_distribution(
    const FeatureSequence& x, std::size_t w, double tau, DistanceMeasure measure,
    PermStrategy strategy = PermStrategy::similarity,
    std::uint64_t guard = kPermutationGuard);

// Same distribution built from a precomputed self-similarity matrix.
PermutationDistribution permutation_distribution_from_selfsim(
    const Matrix& selfsim, std::size_t w, double tau,
    PermStrategy strategy = PermStrategy::similarity,
    std::uint64_t guard = kPermutationGuard);

// Inverse-CDF draw; deterministic given the stream state.
const Permutation& sample_permutation(const PermutationDistribution& dist,
                                      RngStream& rng);

struct AugmentedPair {
  FeatureSequence x;
  FeatureSequence y;
  Permutation pi_x;
  Permutation pi_y;
};

// Independent windowed shuffles of the two modalities.
AugmentedPair augment_pair(const FeatureSequence& x, const FeatureSequence& y,
                           std::size_t w, double tau, DistanceMeasure measure,
                           RngStream& rng,
                           PermStrategy strategy = PermStrategy::similarity);

}  // namespace twalign
