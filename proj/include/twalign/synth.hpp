#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twalign/sequence.hpp"

namespace twalign {

// The four weak-correlation scenarios: cleanly matched order, matches
// shifted within a window, a fraction of captions unrelated to any clip,
// and fully unrelated modality pairs.
enum class ScenarioKind {
  sequential,
  non_sequential,
  partial_irrelevant,
  entire_irrelevant
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& s);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::sequential;
  std::size_t n = 4;            // clips
  std::size_t m = 4;            // captions
  std::size_t d_raw = 16;       // raw feature dimension
  std::size_t latent_dim = 8;   // shared topic dimension
  double noise_sigma = 0.0;
  std::size_t shift_window = 1;     // non_sequential only
  double irrelevance_rate = 0.25;   // partial_irrelevant only
  // distinct topics along the sequence; fewer events than positions makes
  // consecutive items share a topic (the ambiguity regime, many-to-many
  // ground truth). 0 means max(n, m): every position its own topic.
  std::size_t events = 0;
  std::uint64_t seed = 0;
  std::uint64_t map_seed = 1234;    // fixed modality maps, shared per corpus

  void validate() const;
};

// Evaluation labels the real dataset lacks: the true clip/caption matches,
// which indices are unrelated, and the shift applied to captions.
struct GroundTruth {
  std::vector<std::pair<std::size_t, std::size_t>> correspondences;  // 0-based
  std::vector<std::size_t> irrelevant_clips;
  std::vector<std::size_t> irrelevant_captions;
  Permutation applied_shift;  // identity unless non_sequential
};

struct SynthPair {
  FeatureSequence clips;
  FeatureSequence captions;
  GroundTruth gt;
};

// Shared latent topics mapped through two fixed random linear maps plus
// isotropic Gaussian noise; pure function of (spec, seeds).
SynthPair generate_pair(const ScenarioSpec& spec);

struct Corpus {
  std::vector<SynthPair> train;
  std::vector<SynthPair> test;
  std::vector<ScenarioSpec> train_specs;  // resolved per-pair specs
  std::vector<ScenarioSpec> test_specs;
};

// counts.first train pairs and counts.second test pairs per scenario spec;
// test seeds are taken from a disjoint range.
Corpus make_corpus(const std::vector<ScenarioSpec>& specs,
                   std::pair<std::size_t, std::size_t> counts,
                   std::uint64_t base_seed);

}  // namespace twalign
