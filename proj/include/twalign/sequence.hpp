#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "twalign/errors.hpp"

namespace twalign {

enum class Modality { clip, caption };

// The two distance measures exposed everywhere a measure is configurable.
// cosine_dist(x,y) = 1 - <x,y>/(|x||y|), bounded in [0,2];
// neg_dot(x,y)     = -<x,y>.
enum class DistanceMeasure { cosine_dist, neg_dot };

std::string to_string(DistanceMeasure m);
DistanceMeasure measure_from_string(const std::string& s);

// Ordered list of fixed-dimension feature vectors, one per clip or caption.
// Length and dimension are immutable after construction; entries must be
// finite. Zero-norm items are legal to store but are rejected by every
// cosine-distance code path with DegenerateVectorError.
class FeatureSequence {
 public:
  FeatureSequence(std::vector<std::vector<double>> items,
                  Modality tag = Modality::clip);
  FeatureSequence(std::size_t length, std::size_t dim, std::vector<double> flat,
                  Modality tag = Modality::clip);

  std::size_t length() const { return n_; }
  std::size_t dim() const { return d_; }
  Modality modality() const { return tag_; }

  std::span<const double> item(std::size_t k) const {
    return {data_.data() + k * d_, d_};
  }
  const std::vector<double>& flat() const { return data_; }

 private:
  std::size_t n_ = 0, d_ = 0;
  std::vector<double> data_;  // n*d row-major
  Modality tag_;
  void validate() const;
};

// Bijection on {0..n-1}; map_[k] is the source index of the item placed at
// position k, so applying pi yields [x_{pi(0)}, ..., x_{pi(n-1)}].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t k) const { return map_[k]; }
  const std::vector<std::size_t>& map() const { return map_; }

  std::size_t max_displacement() const;
  Permutation inverse() const;
  bool is_identity() const;

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.map_ == b.map_;
  }
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.map_ <=> b.map_;
  }

 private:
  std::vector<std::size_t> map_;
};

FeatureSequence apply_permutation(const FeatureSequence& x, const Permutation& pi);

}  // namespace twalign
