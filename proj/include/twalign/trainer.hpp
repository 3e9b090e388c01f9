#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twalign/loss.hpp"
#include "twalign/matrix.hpp"
#include "twalign/synth.hpp"

namespace twalign {

// Tiny affine encoders standing in for the full-scale backbones; one map
// per modality, d_raw -> d_emb.
struct EncoderParams {
  Matrix w_clip;                // d_emb x d_raw
  std::vector<double> b_clip;   // d_emb
  Matrix w_cap;
  std::vector<double> b_cap;

  static EncoderParams random_init(std::size_t d_raw, std::size_t d_emb,
                                   std::uint64_t seed);
  std::size_t d_raw() const { return w_clip.cols(); }
  std::size_t d_emb() const { return w_clip.rows(); }
};

FeatureSequence encode(const FeatureSequence& raw, const Matrix& w,
                       const std::vector<double>& b, Modality tag);

struct TrainConfig {
  // ablation switches: temporal augmentation, weak alignment, local
  // neighborhood smoothing
  bool ta = true;
  bool wa = true;
  bool ls = true;
  PermStrategy ta_strategy = PermStrategy::similarity;

  double gamma = 0.1;
  double dummy_distance = 0.5;
  DistanceMeasure measure = DistanceMeasure::cosine_dist;
  SmoothOrder order = SmoothOrder::smooth_first;

  std::size_t aug_window = 1;
  double aug_tau = 0.1;

  LossForm loss_form = LossForm::log_of_sum;
  NegativePolicy negatives = NegativePolicy::all_others;

  double learning_rate = 0.05;
  std::size_t steps = 500;
  std::size_t batch_size = 8;
  std::size_t d_emb = 8;
  std::size_t collapse_every = 25;  // trajectory sampling period
  std::uint64_t seed = 0;

  S2dtwParams alignment_params() const;
  void validate() const;
};

struct RetrievalMetrics {
  double r1 = 0.0;
  double r5 = 0.0;
  double medr = 0.0;
};

struct TrainReport {
  std::vector<double> loss_per_step;
  RetrievalMetrics text_to_video;  // caption query, clip candidates
  RetrievalMetrics video_to_text;
  std::vector<double> collapse_trajectory;
  double final_collapse = 0.0;
  TrainConfig config;
  EncoderParams encoders;
};

// Mean pairwise cosine similarity among embeddings of distinct videos;
// 1.0 indicates total collapse.
double collapse_metric(const std::vector<std::vector<double>>& embeddings);

// Ranks every candidate sequence of the other modality by ascending
// alignment cost. Returns (text_to_video, video_to_text).
std::pair<RetrievalMetrics, RetrievalMetrics> evaluate_retrieval(
    const EncoderParams& encoders, const std::vector<SynthPair>& pairs,
    const S2dtwParams& params);

// Plain gradient descent on the encoder parameters with the contrastive
// objective; deterministic given (corpus, config).
TrainReport train(const Corpus& corpus, const TrainConfig& config);

struct AblationRow {
  std::string name;
  TrainConfig config;
  std::vector<TrainReport> per_seed;
  double mean_test_r1 = 0.0;  // mean over seeds, both directions averaged
};

// The six-row grid: plain soft-DTW baseline, the three augmentation
// strategies, +weak alignment, +smoothing (the full method).
std::vector<AblationRow> run_ablation(const Corpus& corpus,
                                      const TrainConfig& base,
                                      std::span<const std::uint64_t> seeds);

}  // namespace twalign
