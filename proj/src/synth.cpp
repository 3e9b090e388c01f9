#include "twalign/synth.hpp"

#include <algorithm>
#include <cmath>

#include "twalign/augment.hpp"
#include "twalign/matrix.hpp"
#include "twalign/rng.hpp"

namespace twalign {

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::sequential: return "sequential";
    case ScenarioKind::non_sequential: return "non_sequential";
    case ScenarioKind::partial_irrelevant: return "partial_irrelevant";
    default: return "entire_irrelevant";
  }
}

ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "sequential") return ScenarioKind::sequential;
  if (s == "non_sequential") return ScenarioKind::non_sequential;
  if (s == "partial_irrelevant") return ScenarioKind::partial_irrelevant;
  if (s == "entire_irrelevant") return ScenarioKind::entire_irrelevant;
  throw ArgumentError("unknown scenario kind: " + s);
}

void ScenarioSpec::validate() const {
  if (n < 1 || m < 1) throw ArgumentError("scenario: lengths must be >= 1");
  if (d_raw < 1 || latent_dim < 1)
    throw ArgumentError("scenario: dimensions must be >= 1");
  if (noise_sigma < 0.0) throw ArgumentError("scenario: sigma must be >= 0");
  if (irrelevance_rate < 0.0 || irrelevance_rate > 1.0)
    throw ArgumentError("scenario: irrelevance rate must be in [0,1]");
}

namespace {

// Random isometry (orthonormal columns) via Gram-Schmidt on a Gaussian
// matrix. Both modality maps share one isometry up to a per-modality scale:
// matched topics then agree in cosine exactly, so matched pairs beat
// mismatched ones for every topic draw, while the raw feature spaces still
// differ per modality.
Matrix random_isometry(std::size_t rows, std::size_t cols, RngStream& g) {
  Matrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> v(rows);
    double norm2 = 0.0;
    while (true) {
      for (auto& x : v) x = gaussian(g);
      for (std::size_t p = 0; p < c; ++p) {
        double dot = 0.0;
        for (std::size_t r = 0; r < rows; ++r) dot += v[r] * m(r, p);
        for (std::size_t r = 0; r < rows; ++r) v[r] -= dot * m(r, p);
      }
      norm2 = 0.0;
      for (double x : v) norm2 += x * x;
      if (norm2 > 1e-12) break;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = v[r] * inv;
  }
  return m;
}

std::vector<double> project(const Matrix& map, const std::vector<double>& t,
                            double sigma, RngStream& g) {
  std::vector<double> out(map.rows(), 0.0);
  for (std::size_t r = 0; r < map.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < map.cols(); ++c) s += map(r, c) * t[c];
    out[r] = s + (sigma > 0.0 ? sigma * gaussian(g) : 0.0);
  }
  return out;
}

// Monotone surjection of sequence positions onto shared event slots;
// identity when n == m.
std::size_t event_of(std::size_t idx, std::size_t len, std::size_t events) {
  if (len == 1) return 0;
  return (idx * (events - 1) + (len - 1) / 2) / (len - 1);
}

}  // namespace

SynthPair generate_pair(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.latent_dim > spec.d_raw)
    throw ArgumentError("scenario: latent_dim must be <= d_raw");
  RngStream map_rng(spec.map_seed);
  const Matrix clip_map = random_isometry(spec.d_raw, spec.latent_dim, map_rng);
  Matrix cap_map = clip_map;
  for (double& v : cap_map.data()) v *= 1.5;

  RngStream rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t events =
      spec.events ? std::min(spec.events, std::max(spec.n, spec.m))
                  : std::max(spec.n, spec.m);
  std::vector<std::vector<double>> topics(events);
  for (auto& t : topics) t = unit_sphere(spec.latent_dim, rng);

  GroundTruth gt;
  gt.applied_shift = Permutation::identity(spec.m);

  std::vector<std::vector<double>> clips(spec.n), captions(spec.m);
  for (std::size_t i = 0; i < spec.n; ++i)
    clips[i] = project(clip_map, topics[event_of(i, spec.n, events)],
                       spec.noise_sigma, rng);

  const bool all_fresh = spec.kind == ScenarioKind::entire_irrelevant;
  for (std::size_t j = 0; j < spec.m; ++j) {
    if (all_fresh) {
      captions[j] = project(cap_map, unit_sphere(spec.latent_dim, rng),
                            spec.noise_sigma, rng);
    } else {
      captions[j] = project(cap_map, topics[event_of(j, spec.m, events)],
                            spec.noise_sigma, rng);
    }
  }

  if (!all_fresh) {
    for (std::size_t i = 0; i < spec.n; ++i)
      for (std::size_t j = 0; j < spec.m; ++j)
        if (event_of(i, spec.n, events) == event_of(j, spec.m, events))
          gt.correspondences.emplace_back(i, j);
  } else {
    gt.irrelevant_clips.resize(spec.n);
    gt.irrelevant_captions.resize(spec.m);
    for (std::size_t i = 0; i < spec.n; ++i) gt.irrelevant_clips[i] = i;
    for (std::size_t j = 0; j < spec.m; ++j) gt.irrelevant_captions[j] = j;
  }

  if (spec.kind == ScenarioKind::partial_irrelevant) {
    // fresh topics, never corrupted matched ones
    std::size_t k = static_cast<std::size_t>(
        std::ceil(spec.irrelevance_rate * static_cast<double>(spec.m)));
    k = std::min(k, spec.m);
    std::vector<std::size_t> idx(spec.m);
    for (std::size_t j = 0; j < spec.m; ++j) idx[j] = j;
    for (std::size_t j = spec.m; j-- > 1;)
      std::swap(idx[j], idx[uniform_index(rng, j + 1)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    for (std::size_t j : idx) {
      captions[j] = project(cap_map, unit_sphere(spec.latent_dim, rng),
                            spec.noise_sigma, rng);
      gt.irrelevant_captions.push_back(j);
      std::erase_if(gt.correspondences,
                    [j](const auto& c) { return c.second == j; });
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
      const bool matched = std::any_of(
          gt.correspondences.begin(), gt.correspondences.end(),
          [i](const auto& c) { return c.first == i; });
      if (!matched) gt.irrelevant_clips.push_back(i);
    }
  }

  FeatureSequence cap_seq(captions, Modality::caption);

  if (spec.kind == ScenarioKind::non_sequential) {
    const auto perms = windowed_permutations(spec.m, spec.shift_window);
    const Permutation& pi = perms[uniform_index(rng, perms.size())];
    cap_seq = apply_permutation(cap_seq, pi);
    const Permutation inv = pi.inverse();
    for (auto& c : gt.correspondences) c.second = inv(c.second);
    gt.applied_shift = pi;
  }

  return {FeatureSequence(clips, Modality::clip), std::move(cap_seq),
          std::move(gt)};
}

Corpus make_corpus(const std::vector<ScenarioSpec>& specs,
                   std::pair<std::size_t, std::size_t> counts,
                   std::uint64_t base_seed) {
  if (specs.empty()) throw ArgumentError("make_corpus: no scenario specs");
  Corpus corpus;
  std::uint64_t k = 0;
  for (const auto& spec : specs) {
    for (std::size_t t = 0; t < counts.first; ++t, ++k) {
      ScenarioSpec s = spec;
      s.seed = base_seed + k;
      corpus.train.push_back(generate_pair(s));
      corpus.train_specs.push_back(s);
    }
  }
  // test seeds live in a disjoint range
  k = 0;
  for (const auto& spec : specs) {
    for (std::size_t t = 0; t < counts.second; ++t, ++k) {
      ScenarioSpec s = spec;
      s.seed = base_seed + 1000000 + k;
      corpus.test.push_back(generate_pair(s));
      corpus.test_specs.push_back(s);
    }
  }
  return corpus;
}

}  // namespace twalign
