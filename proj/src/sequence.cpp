#include "twalign/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twalign {

std::string to_string(DistanceMeasure m) {
  return m == DistanceMeasure::cosine_dist ? "cosine" : "negdot";
}

DistanceMeasure measure_from_string(const std::string& s) {
  if (s == "cosine" || s == "cosine_dist") return DistanceMeasure::cosine_dist;
  if (s == "negdot" || s == "neg_dot") return DistanceMeasure::neg_dot;
  throw ArgumentError("unknown distance measure: " + s);
}

FeatureSequence::FeatureSequence(std::vector<std::vector<double>> items,
                                 Modality tag)
    : tag_(tag) {
  if (items.empty()) throw DimensionError("FeatureSequence: length must be >= 1");
  n_ = items.size();
  d_ = items.front().size();
  data_.reserve(n_ * d_);
  for (const auto& it : items) {
    if (it.size() != d_)
      throw DimensionError("FeatureSequence: items differ in dimension");
    data_.insert(data_.end(), it.begin(), it.end());
  }
  validate();
}

FeatureSequence::FeatureSequence(std::size_t length, std::size_t dim,
                                 std::vector<double> flat, Modality tag)
    : n_(length), d_(dim), data_(std::move(flat)), tag_(tag) {
  if (n_ < 1) throw DimensionError("FeatureSequence: length must be >= 1");
  if (data_.size() != n_ * d_)
    throw DimensionError("FeatureSequence: flat size does not match n*d");
  validate();
}

void FeatureSequence::validate() const {
  if (d_ < 1) throw DimensionError("FeatureSequence: dimension must be >= 1");
  for (double v : data_)
    if (!std::isfinite(v))
      throw NumericError("FeatureSequence: non-finite entry");
}

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v])
      throw PermutationError("Permutation: mapping is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

std::size_t Permutation::max_displacement() const {
  std::size_t d = 0;
  for (std::size_t k = 0; k < map_.size(); ++k) {
    const std::size_t disp = map_[k] > k ? map_[k] - k : k - map_[k];
    d = std::max(d, disp);
  }
  return d;
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t k = 0; k < map_.size(); ++k) inv[map_[k]] = k;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (std::size_t k = 0; k < map_.size(); ++k)
    if (map_[k] != k) return false;
  return true;
}

FeatureSequence apply_permutation(const FeatureSequence& x,
                                  const Permutation& pi) {
  if (pi.size() != x.length())
    throw PermutationError("apply_permutation: length mismatch");
  std::vector<double> flat(x.length() * x.dim());
  for (std::size_t k = 0; k < x.length(); ++k) {
    const auto src = x.item(pi(k));
    std::copy(src.begin(), src.end(), flat.begin() + k * x.dim());
  }
  return FeatureSequence(x.length(), x.dim(), std::move(flat), x.modality());
}

}  // namespace twalign
