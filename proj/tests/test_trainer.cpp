#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "twalign/trainer.hpp"

using namespace twalign;

namespace {

Corpus tiny_corpus(std::uint64_t seed, std::size_t pairs = 8,
                   ScenarioKind kind = ScenarioKind::sequential) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.n = spec.m = 4;
  spec.noise_sigma = 0.0;
  return make_corpus({spec}, {pairs, pairs}, seed);
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.steps = 5;
  cfg.batch_size = 4;
  cfg.collapse_every = 0;
  return cfg;
}

}  // namespace

TEST_CASE("collapse metric endpoints") {
  std::vector<std::vector<double>> same(3, {1.0, 2.0, 0.5});
  CHECK(collapse_metric(same) == doctest::Approx(1.0));
  std::vector<std::vector<double>> ortho = {
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  CHECK(collapse_metric(ortho) == doctest::Approx(0.0));
  CHECK_THROWS_AS(collapse_metric({{1.0}}), ArgumentError);
  CHECK_THROWS_AS(collapse_metric({{0.0}, {1.0}}), DegenerateVectorError);
}

TEST_CASE("retrieval metrics with a perfect cost structure") {
  // identical corpora on both sides: the true counterpart is uniquely
  // minimal for every query, so R@1 = 1 and MedR = 1
  auto corpus = tiny_corpus(42, 6);
  EncoderParams enc = EncoderParams::random_init(16, 16, 0);
  // identity-ish encoders: use the raw features directly
  enc.w_clip = Matrix(16, 16, 0.0);
  enc.w_cap = Matrix(16, 16, 0.0);
  for (std::size_t k = 0; k < 16; ++k) {
    enc.w_clip(k, k) = 1.0;
    enc.w_cap(k, k) = 1.0;
  }
  S2dtwParams params;
  auto [t2v, v2t] = evaluate_retrieval(enc, corpus.test, params);
  CHECK(t2v.r1 == doctest::Approx(1.0));
  CHECK(t2v.medr == doctest::Approx(1.0));
  CHECK(v2t.r1 == doctest::Approx(1.0));
  CHECK(t2v.r1 <= t2v.r5 + 1e-12);
}

TEST_CASE("retrieval needs at least five pairs") {
  auto corpus = tiny_corpus(43, 2);
  EncoderParams enc = EncoderParams::random_init(16, 8, 0);
  S2dtwParams params;
  CHECK_THROWS_AS(evaluate_retrieval(enc, corpus.test, params), ArgumentError);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  auto corpus = tiny_corpus(44);
  TrainConfig cfg = quick_config();
  cfg.learning_rate = 0.0;
  cfg.seed = 5;
  auto report = train(corpus, cfg);
  EncoderParams init = EncoderParams::random_init(16, cfg.d_emb, cfg.seed);
  CHECK(report.encoders.w_clip == init.w_clip);
  CHECK(report.encoders.w_cap == init.w_cap);
  CHECK(report.loss_per_step.size() == cfg.steps);
}

TEST_CASE("training is deterministic in the seed") {
  auto corpus = tiny_corpus(45);
  TrainConfig cfg = quick_config();
  cfg.seed = 11;
  auto a = train(corpus, cfg);
  auto b = train(corpus, cfg);
  CHECK(a.loss_per_step == b.loss_per_step);
  CHECK(a.encoders.w_clip == b.encoders.w_clip);
  CHECK(a.text_to_video.r1 == b.text_to_video.r1);
  cfg.seed = 12;
  auto c = train(corpus, cfg);
  CHECK(a.loss_per_step != c.loss_per_step);
}

TEST_CASE("one gradient step decreases the loss on a frozen batch") {
  // line-search property: for small enough lr the analytic gradient is a
  // descent direction
  auto corpus = tiny_corpus(46, 4);
  TrainConfig cfg = quick_config();
  cfg.batch_size = 4;
  cfg.ta = false;
  cfg.seed = 3;
  const S2dtwParams align = cfg.alignment_params();

  EncoderParams enc = EncoderParams::random_init(16, cfg.d_emb, cfg.seed);
  auto eval_loss = [&](const EncoderParams& e) {
    Batch batch;
    for (const auto& p : corpus.train) {
      batch.clips.push_back(encode(p.clips, e.w_clip, e.b_clip, Modality::clip));
      batch.captions.push_back(
          encode(p.captions, e.w_cap, e.b_cap, Modality::caption));
    }
    return batch_loss(batch, align, cfg.loss_form);
  };
  auto base = eval_loss(enc);

  // assemble parameter gradients exactly as the trainer does
  Matrix gw_clip(cfg.d_emb, 16), gw_cap(cfg.d_emb, 16);
  std::vector<double> gb_clip(cfg.d_emb, 0.0), gb_cap(cfg.d_emb, 0.0);
  for (std::size_t k = 0; k < corpus.train.size(); ++k) {
    const auto& p = corpus.train[k];
    for (std::size_t t = 0; t < p.clips.length(); ++t)
      for (std::size_t r = 0; r < cfg.d_emb; ++r) {
        gb_clip[r] += base.grad_clips[k](t, r);
        for (std::size_t c = 0; c < 16; ++c)
          gw_clip(r, c) += base.grad_clips[k](t, r) * p.clips.item(t)[c];
      }
    for (std::size_t t = 0; t < p.captions.length(); ++t)
      for (std::size_t r = 0; r < cfg.d_emb; ++r) {
        gb_cap[r] += base.grad_captions[k](t, r);
        for (std::size_t c = 0; c < 16; ++c)
          gw_cap(r, c) += base.grad_captions[k](t, r) * p.captions.item(t)[c];
      }
  }
  double lr = 0.5;
  bool decreased = false;
  for (int tries = 0; tries < 12 && !decreased; ++tries, lr *= 0.5) {
    EncoderParams stepped = enc;
    for (std::size_t k = 0; k < gw_clip.data().size(); ++k)
      stepped.w_clip.data()[k] -= lr * gw_clip.data()[k];
    for (std::size_t k = 0; k < gw_cap.data().size(); ++k)
      stepped.w_cap.data()[k] -= lr * gw_cap.data()[k];
    for (std::size_t r = 0; r < cfg.d_emb; ++r) {
      stepped.b_clip[r] -= lr * gb_clip[r];
      stepped.b_cap[r] -= lr * gb_cap[r];
    }
    if (eval_loss(stepped).loss < base.loss) decreased = true;
  }
  CHECK(decreased);
}

TEST_CASE("divergence raises with the failing step index") {
  // the unbounded dot-product measure with an absurd step size overflows
  auto corpus = tiny_corpus(49, 4);
  TrainConfig cfg = quick_config();
  cfg.steps = 50;
  cfg.measure = DistanceMeasure::neg_dot;
  cfg.learning_rate = 1e12;
  try {
    train(corpus, cfg);
    FAIL("expected TrainingDivergedError");
  } catch (const TrainingDivergedError& e) {
    CHECK(e.step < 50);
  }
}

TEST_CASE("train rejects invalid configs") {
  auto corpus = tiny_corpus(47, 4);
  TrainConfig cfg = quick_config();
  cfg.batch_size = 1;  // contrastive negatives need >= 2
  CHECK_THROWS_AS(train(corpus, cfg), ArgumentError);
  cfg = quick_config();
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(train(corpus, cfg), ArgumentError);
}

TEST_CASE("ablation grid has the six rows") {
  auto corpus = tiny_corpus(48, 4);
  TrainConfig base = quick_config();
  base.steps = 2;
  const std::uint64_t seeds[] = {1};
  auto rows = run_ablation(corpus, base, seeds);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].name == "baseline");
  CHECK_FALSE(rows[0].config.ta);
  CHECK(rows[0].config.gamma == doctest::Approx(0.01));
  CHECK(rows[1].config.ta_strategy == PermStrategy::similarity);
  CHECK(rows[2].config.ta_strategy == PermStrategy::uniform);
  CHECK(rows[3].config.ta_strategy == PermStrategy::inverse);
  CHECK(rows[4].config.wa);
  CHECK_FALSE(rows[4].config.ls);
  CHECK(rows[5].config.wa);
  CHECK(rows[5].config.ls);
  for (const auto& r : rows) CHECK(r.per_seed.size() == 1);
}
