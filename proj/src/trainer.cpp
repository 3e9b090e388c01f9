#include "twalign/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twalign {

S2dtwParams TrainConfig::alignment_params() const {
  S2dtwParams p;
  p.gamma = gamma;
  p.dummy_distance = dummy_distance;
  p.measure = measure;
  p.order = order;
  p.smoothing = ls;
  p.weak_alignment = wa;
  return p;
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0)) throw ArgumentError("train: gamma must be > 0");
  if (!(learning_rate >= 0.0)) throw ArgumentError("train: negative learning rate");
  if (batch_size < 1) throw ArgumentError("train: batch size must be >= 1");
  if (batch_size < 2 && negatives == NegativePolicy::all_others)
    throw ArgumentError("train: contrastive negatives require batch size >= 2");
  if (d_emb < 1) throw ArgumentError("train: d_emb must be >= 1");
}

EncoderParams EncoderParams::random_init(std::size_t d_raw, std::size_t d_emb,
                                         std::uint64_t seed) {
  RngStream g(seed ^ 0x51f2cd5a6a2efb01ull);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_raw));
  EncoderParams p;
  p.w_clip = Matrix(d_emb, d_raw);
  p.w_cap = Matrix(d_emb, d_raw);
  for (double& v : p.w_clip.data()) v = scale * gaussian(g);
  for (double& v : p.w_cap.data()) v = scale * gaussian(g);
  p.b_clip.assign(d_emb, 0.0);
  p.b_cap.assign(d_emb, 0.0);
  return p;
}

FeatureSequence encode(const FeatureSequence& raw, const Matrix& w,
                       const std::vector<double>& b, Modality tag) {
  const std::size_t n = raw.length(), de = w.rows(), dr = w.cols();
  if (raw.dim() != dr) throw DimensionError("encode: raw dimension mismatch");
  std::vector<double> flat(n * de);
  for (std::size_t t = 0; t < n; ++t) {
    const auto x = raw.item(t);
    for (std::size_t r = 0; r < de; ++r) {
      double s = b[r];
      for (std::size_t c = 0; c < dr; ++c) s += w(r, c) * x[c];
      flat[t * de + r] = s;
    }
  }
  return FeatureSequence(n, de, std::move(flat), tag);
}

double collapse_metric(const std::vector<std::vector<double>>& embeddings) {
  if (embeddings.size() < 2)
    throw ArgumentError("collapse_metric: need at least 2 embeddings");
  const std::size_t n = embeddings.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : embeddings[i]) s += v * v;
    norms[i] = std::sqrt(s);
    if (norms[i] == 0.0)
      throw DegenerateVectorError("collapse_metric: zero embedding");
  }
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < embeddings[i].size(); ++k)
        dot += embeddings[i][k] * embeddings[j][k];
      acc += dot / (norms[i] * norms[j]);
      ++pairs;
    }
  }
  return acc / static_cast<double>(pairs);
}

namespace {

std::vector<double> pooled_embedding(const FeatureSequence& seq) {
  std::vector<double> mean(seq.dim(), 0.0);
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const auto it = seq.item(t);
    for (std::size_t k = 0; k < seq.dim(); ++k) mean[k] += it[k];
  }
  for (double& v : mean) v /= static_cast<double>(seq.length());
  return mean;
}

double collapse_over(const EncoderParams& enc,
                     const std::vector<SynthPair>& pairs) {
  std::vector<std::vector<double>> pooled;
  pooled.reserve(pairs.size());
  for (const auto& p : pairs)
    pooled.push_back(pooled_embedding(
        encode(p.clips, enc.w_clip, enc.b_clip, Modality::clip)));
  return collapse_metric(pooled);
}

RetrievalMetrics metrics_from_ranks(const std::vector<double>& ranks) {
  RetrievalMetrics m;
  const double n = static_cast<double>(ranks.size());
  for (double r : ranks) {
    if (r <= 1.0) m.r1 += 1.0;
    if (r <= 5.0) m.r5 += 1.0;
  }
  m.r1 /= n;
  m.r5 /= n;
  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  m.medr = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  return m;
}

}  // namespace

std::pair<RetrievalMetrics, RetrievalMetrics> evaluate_retrieval(
    const EncoderParams& encoders, const std::vector<SynthPair>& pairs,
    const S2dtwParams& params) {
  const std::size_t n = pairs.size();
  if (n < 5) throw ArgumentError("evaluate_retrieval: need >= 5 pairs for R@5");
  std::vector<FeatureSequence> clips, captions;
  clips.reserve(n);
  captions.reserve(n);
  for (const auto& p : pairs) {
    clips.push_back(encode(p.clips, encoders.w_clip, encoders.b_clip,
                           Modality::clip));
    captions.push_back(encode(p.captions, encoders.w_cap, encoders.b_cap,
                              Modality::caption));
  }
  Matrix costs(n, n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(n); ++q)
    for (std::size_t c = 0; c < n; ++c)
      costs(static_cast<std::size_t>(q), c) =
          s2dtw_forward(clips[static_cast<std::size_t>(q)], captions[c], params)
              .cost;

  // rank of the true counterpart by ascending cost; ties counted
  // pessimistically (worst rank) so a constant cost matrix scores at chance
  // level or below, never spuriously high
  std::vector<double> t2v_ranks(n), v2t_ranks(n);
  for (std::size_t q = 0; q < n; ++q) {
    double own = costs(q, q);
    std::size_t better_t2v = 0, equal_t2v = 0, better_v2t = 0, equal_v2t = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == q) continue;
      if (costs(c, q) < own) ++better_t2v;
      if (costs(c, q) == own) ++equal_t2v;
      if (costs(q, c) < own) ++better_v2t;
      if (costs(q, c) == own) ++equal_v2t;
    }
    t2v_ranks[q] = static_cast<double>(1 + better_t2v + equal_t2v);
    v2t_ranks[q] = static_cast<double>(1 + better_v2t + equal_v2t);
  }
  return {metrics_from_ranks(t2v_ranks), metrics_from_ranks(v2t_ranks)};
}

TrainReport train(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  if (corpus.train.empty()) throw ArgumentError("train: empty corpus");

  TrainReport report;
  report.config = config;
  const std::size_t d_raw = corpus.train.front().clips.dim();
  EncoderParams enc =
      EncoderParams::random_init(d_raw, config.d_emb, config.seed);
  const S2dtwParams align = config.alignment_params();

  RngStream rng(config.seed * 0x2545F4914F6CDD1Dull + 1);
  const std::size_t ntrain = corpus.train.size();
  const std::size_t bsz = std::min(config.batch_size, ntrain);

  std::vector<std::size_t> order(ntrain);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = ntrain;  // forces a shuffle on first use

  NegativeSpec negs;
  negs.policy = config.negatives;

  std::optional<AugmentConfig> aug;
  if (config.ta)
    aug = AugmentConfig{config.aug_window, config.aug_tau, config.ta_strategy};

  for (std::size_t step = 0; step < config.steps; ++step) {
    // deterministic shuffled cycling over the train set
    Batch batch;
    batch.negatives = negs;
    std::vector<std::size_t> picked(bsz);
    for (std::size_t k = 0; k < bsz; ++k) {
      if (cursor >= ntrain) {
        for (std::size_t j = ntrain; j-- > 1;)
          std::swap(order[j], order[uniform_index(rng, j + 1)]);
        cursor = 0;
      }
      picked[k] = order[cursor++];
      const SynthPair& p = corpus.train[picked[k]];
      batch.clips.push_back(
          encode(p.clips, enc.w_clip, enc.b_clip, Modality::clip));
      batch.captions.push_back(
          encode(p.captions, enc.w_cap, enc.b_cap, Modality::caption));
    }

    LossOutput lo;
    try {
      lo = batch_loss(batch, align, config.loss_form, aug, &rng);
    } catch (const NumericError&) {
      throw TrainingDivergedError("train: non-finite loss", step);
    }
    report.loss_per_step.push_back(lo.loss);

    // chain embedding gradients into the affine maps
    Matrix gw_clip(enc.w_clip.rows(), enc.w_clip.cols());
    Matrix gw_cap(enc.w_cap.rows(), enc.w_cap.cols());
    std::vector<double> gb_clip(config.d_emb, 0.0), gb_cap(config.d_emb, 0.0);
    for (std::size_t k = 0; k < bsz; ++k) {
      const SynthPair& p = corpus.train[picked[k]];
      for (std::size_t t = 0; t < p.clips.length(); ++t) {
        const auto raw = p.clips.item(t);
        for (std::size_t r = 0; r < config.d_emb; ++r) {
          const double g = lo.grad_clips[k](t, r);
          gb_clip[r] += g;
          for (std::size_t c = 0; c < d_raw; ++c)
            gw_clip(r, c) += g * raw[c];
        }
      }
      for (std::size_t t = 0; t < p.captions.length(); ++t) {
        const auto raw = p.captions.item(t);
        for (std::size_t r = 0; r < config.d_emb; ++r) {
          const double g = lo.grad_captions[k](t, r);
          gb_cap[r] += g;
          for (std::size_t c = 0; c < d_raw; ++c) gw_cap(r, c) += g * raw[c];
        }
      }
    }
    const double lr = config.learning_rate;
    for (std::size_t k = 0; k < gw_clip.data().size(); ++k)
      enc.w_clip.data()[k] -= lr * gw_clip.data()[k];
    for (std::size_t k = 0; k < gw_cap.data().size(); ++k)
      enc.w_cap.data()[k] -= lr * gw_cap.data()[k];
    for (std::size_t r = 0; r < config.d_emb; ++r) {
      enc.b_clip[r] -= lr * gb_clip[r];
      enc.b_cap[r] -= lr * gb_cap[r];
    }

    if (config.collapse_every && step % config.collapse_every == 0 &&
        corpus.train.size() >= 2)
      report.collapse_trajectory.push_back(collapse_over(enc, corpus.train));
  }

  if (corpus.train.size() >= 2)
    report.final_collapse = collapse_over(enc, corpus.train);
  if (corpus.test.size() >= 5) {
    auto [t2v, v2t] = evaluate_retrieval(enc, corpus.test, align);
    report.text_to_video = t2v;
    report.video_to_text = v2t;
  }
  report.encoders = std::move(enc);
  return report;
}

std::vector<AblationRow> run_ablation(const Corpus& corpus,
                                      const TrainConfig& base,
                                      std::span<const std::uint64_t> seeds) {
  // the six-row grid; rows 1-5 run the near-hard gamma, the full method
  // keeps the configured smoothing scale
  struct RowSpec {
    const char* name;
    bool ta, wa, ls;
    PermStrategy strat;
  };
  const RowSpec rows[6] = {
      {"baseline", false, false, false, PermStrategy::similarity},
      {"ta_similarity", true, false, false, PermStrategy::similarity},
      {"ta_uniform", true, false, false, PermStrategy::uniform},
      {"ta_inverse", true, false, false, PermStrategy::inverse},
      {"ta_wa", true, true, false, PermStrategy::similarity},
      {"full", true, true, true, PermStrategy::similarity},
  };
  // rows are compared on representation quality, so every row is scored by
  // one common neutral ranker (near-hard soft-DTW); the weak-alignment
  // scorer saturates above the all-dummy ceiling and would tie all distant
  // candidates regardless of how good the embeddings are
  S2dtwParams common_eval;
  common_eval.gamma = 0.01;
  common_eval.measure = base.measure;
  common_eval.smoothing = false;
  common_eval.weak_alignment = false;

  std::vector<AblationRow> out;
  for (const auto& r : rows) {
    AblationRow row;
    row.name = r.name;
    TrainConfig cfg = base;
    cfg.ta = r.ta;
    cfg.wa = r.wa;
    cfg.ls = r.ls;
    cfg.ta_strategy = r.strat;
    if (!r.ls) cfg.gamma = 0.01;
    row.config = cfg;
    double acc = 0.0;
    for (std::uint64_t s : seeds) {
      TrainConfig c = cfg;
      c.seed = s;
      TrainReport rep = train(corpus, c);
      if (corpus.test.size() >= 5) {
        auto [t2v, v2t] =
            evaluate_retrieval(rep.encoders, corpus.test, common_eval);
        rep.text_to_video = t2v;
        rep.video_to_text = v2t;
        acc += 0.5 * (t2v.r1 + v2t.r1);
      }
      row.per_seed.push_back(std::move(rep));
    }
    row.mean_test_r1 =
        seeds.empty() ? 0.0 : acc / static_cast<double>(seeds.size());
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace twalign
