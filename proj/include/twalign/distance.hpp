#pragma once

#include <span>

#include "twalign/matrix.hpp"
#include "twalign/sequence.hpp"

namespace twalign {

// Pairwise distance matrix delta_{i,j} together with the measure that
// produced it. Under cosine_dist every entry lies in [0,2].
struct DistanceMatrix {
  Matrix values;
  DistanceMeasure measure = DistanceMeasure::cosine_dist;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

double distance(std::span<const double> x, std::span<const double> y,
                DistanceMeasure measure);

// d(delta)/dx and d(delta)/dy for one item pair; used by the embedding
// gradient chain.
void distance_grad(std::span<const double> x, std::span<const double> y,
                   DistanceMeasure measure, std::span<double> gx,
                   std::span<double> gy);

// Serial reference; kept as the comparison point for the OpenMP kernel.
DistanceMatrix pairwise_distance_serial(const FeatureSequence& x,
                                        const FeatureSequence& y,
                                        DistanceMeasure measure);

// OpenMP-parallel fill over independent (i,j) cells; bit-identical to the
// serial reference.
DistanceMatrix pairwise_distance(const FeatureSequence& x,
                                 const FeatureSequence& y,
                                 DistanceMeasure measure);

DistanceMatrix self_similarity(const FeatureSequence& x, DistanceMeasure measure);

}  // namespace twalign
