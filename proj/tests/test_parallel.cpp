// The OpenMP kernels must reproduce the serial reference bit for bit: every
// cell is an independent pure computation written to its own slot, so the
// schedule cannot change results.

#include "doctest.h"
#include "oracles.hpp"
#include "twalign/distance.hpp"
#include "twalign/loss.hpp"

using namespace twalign;

TEST_CASE("parallel pairwise distance equals the serial reference") {
  RngStream g(501);
  for (int trial = 0; trial < 5; ++trial) {
    auto x = oracles::random_sequence(40, 8, g);
    auto y = oracles::random_sequence(33, 8, g, Modality::caption);
    for (auto measure : {DistanceMeasure::cosine_dist, DistanceMeasure::neg_dot}) {
      auto serial = pairwise_distance_serial(x, y, measure);
      auto parallel = pairwise_distance(x, y, measure);
      CHECK(serial.values == parallel.values);
    }
  }
}

TEST_CASE("parallel batch cost matrix equals the serial reference") {
  RngStream g(503);
  std::vector<FeatureSequence> clips, captions;
  for (int i = 0; i < 6; ++i) {
    clips.push_back(oracles::random_sequence(4, 6, g));
    captions.push_back(oracles::random_sequence(5, 6, g, Modality::caption));
  }
  S2dtwParams params;
  NegativeSpec negs;
  auto serial = batch_cost_matrix_serial(clips, captions, params, negs);
  auto parallel = batch_cost_matrix(clips, captions, params, negs);
  REQUIRE(serial.rows() == parallel.rows());
  for (std::size_t i = 0; i < serial.rows(); ++i)
    for (std::size_t j = 0; j < serial.cols(); ++j) {
      if (std::isnan(serial(i, j))) {
        CHECK(std::isnan(parallel(i, j)));
      } else {
        CHECK(serial(i, j) == parallel(i, j));
      }
    }
}

TEST_CASE("batch loss is reproducible across repeated parallel runs") {
  RngStream g(509);
  Batch batch;
  for (int i = 0; i < 5; ++i) {
    batch.clips.push_back(oracles::random_sequence(4, 6, g));
    batch.captions.push_back(oracles::random_sequence(4, 6, g, Modality::caption));
  }
  S2dtwParams params;
  auto a = batch_loss(batch, params);
  auto b = batch_loss(batch, params);
  CHECK(a.loss == b.loss);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.grad_clips[i] == b.grad_clips[i]);
    CHECK(a.grad_captions[i] == b.grad_captions[i]);
  }
}
