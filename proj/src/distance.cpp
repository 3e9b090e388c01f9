#include "twalign/distance.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twalign {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void check_dims(const FeatureSequence& x, const FeatureSequence& y) {
  if (x.dim() != y.dim())
    throw DimensionError("pairwise_distance: feature dimensions differ");
}

// Cosine paths reject zero-norm vectors before any cell is computed.
void check_norms(const FeatureSequence& s) {
  for (std::size_t i = 0; i < s.length(); ++i)
    if (norm(s.item(i)) == 0.0)
      throw DegenerateVectorError(
          "cosine distance: zero-norm vector at index " + std::to_string(i));
}

}  // namespace

double distance(std::span<const double> x, std::span<const double> y,
                DistanceMeasure measure) {
  if (x.size() != y.size())
    throw DimensionError("distance: vector dimensions differ");
  if (measure == DistanceMeasure::neg_dot) return -dot(x, y);
  const double nx = norm(x), ny = norm(y);
  if (nx == 0.0 || ny == 0.0)
    throw DegenerateVectorError("cosine distance: zero-norm vector");
  return 1.0 - dot(x, y) / (nx * ny);
}

void distance_grad(std::span<const double> x, std::span<const double> y,
                   DistanceMeasure measure, std::span<double> gx,
                   std::span<double> gy) {
  const std::size_t d = x.size();
  if (measure == DistanceMeasure::neg_dot) {
    for (std::size_t k = 0; k < d; ++k) {
      gx[k] = -y[k];
      gy[k] = -x[k];
    }
    return;
  }
  const double nx = norm(x), ny = norm(y);
  if (nx == 0.0 || ny == 0.0)
    throw DegenerateVectorError("cosine gradient: zero-norm vector");
  const double cos = dot(x, y) / (nx * ny);
  // d/dx [1 - cos] = (cos * xhat - yhat) / |x|
  for (std::size_t k = 0; k < d; ++k) {
    gx[k] = (cos * x[k] / nx - y[k] / ny) / nx;
    gy[k] = (cos * y[k] / ny - x[k] / nx) / ny;
  }
}

DistanceMatrix pairwise_distance_serial(const FeatureSequence& x,
                                        const FeatureSequence& y,
                                        DistanceMeasure measure) {
  check_dims(x, y);
  if (measure == DistanceMeasure::cosine_dist) {
    check_norms(x);
    check_norms(y);
  }
  Matrix out(x.length(), y.length());
  for (std::size_t i = 0; i < x.length(); ++i)
    for (std::size_t j = 0; j < y.length(); ++j)
      out(i, j) = distance(x.item(i), y.item(j), measure);
  return {out, measure};
}

DistanceMatrix pairwise_distance(const FeatureSequence& x,
                                 const FeatureSequence& y,
                                 DistanceMeasure measure) {
  check_dims(x, y);
  if (measure == DistanceMeasure::cosine_dist) {
    check_norms(x);
    check_norms(y);
  }
  const std::size_t n = x.length(), m = y.length();
  Matrix out(n, m);
  bool parallelize = n * m >= 256;
#ifdef _OPENMP
  if (omp_in_parallel()) parallelize = false;  // no nested teams
#endif
#pragma omp parallel for schedule(static) if (parallelize)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    for (std::size_t j = 0; j < m; ++j)
      out(static_cast<std::size_t>(i), j) =
          distance(x.item(static_cast<std::size_t>(i)), y.item(j), measure);
  return {out, measure};
}

DistanceMatrix self_similarity(const FeatureSequence& x,
                               DistanceMeasure measure) {
  return pairwise_distance(x, x, measure);
}

}  // namespace twalign
