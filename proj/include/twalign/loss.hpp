#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "twalign/augment.hpp"
#include "twalign/matrix.hpp"
#include "twalign/s2dtw.hpp"
#include "twalign/sequence.hpp"

namespace twalign {

// log_of_sum is the -log sum_i(ratio_i) form; sum_of_logs the conventional
// -sum_i log(ratio_i) alternative, kept behind a switch because the two
// weight batch items differently.
enum class LossForm { log_of_sum, sum_of_logs };

std::string to_string(LossForm f);
LossForm loss_form_from_string(const std::string& s);

// all_others: N_i = every j != i. none: no contrastive term at all; the
// objective degrades to the sum of positive costs (the ratio form is
// constant without negatives, so this is the "positives only" training
// mode used to demonstrate feature collapse). custom: explicit per-i lists
// plus an optional active-row subset.
enum class NegativePolicy { all_others, none, custom };

struct NegativeSpec {
  NegativePolicy policy = NegativePolicy::all_others;
  std::vector<std::vector<std::size_t>> lists;   // custom only
  std::vector<std::size_t> active_rows;           // custom only; empty = all
};

std::vector<std::size_t> negative_set(std::size_t i, std::size_t batch_size,
                                      const NegativeSpec& spec);

struct Batch {
  std::vector<FeatureSequence> clips;
  std::vector<FeatureSequence> captions;
  NegativeSpec negatives;

  std::size_t size() const { return clips.size(); }
};

struct AugmentConfig {
  std::size_t window = 1;
  double tau = 0.1;
  PermStrategy strategy = PermStrategy::similarity;
};

struct LossOutput {
  double loss = 0.0;
  std::vector<double> positive_costs;  // B
  Matrix cost_matrix;                  // B x B; diagonal = positives;
                                       // unevaluated cells hold NaN
  std::vector<double> ratios;          // per-pair softmax ratios
  // Gradients w.r.t. every sequence item, indexed by the original
  // (pre-augmentation) item positions. grad_clips[i] is length(i) x d.
  std::vector<Matrix> grad_clips;
  std::vector<Matrix> grad_captions;
  std::vector<Permutation> applied_pi_x;  // identity when augmentation off
  std::vector<Permutation> applied_pi_y;
};

// Serial reference for the pair-cost fill; the OpenMP kernel must match it
// bit for bit.
Matrix batch_cost_matrix_serial(const std::vector<FeatureSequence>& clips,
                                const std::vector<FeatureSequence>& captions,
                                const S2dtwParams& params,
                                const NegativeSpec& negatives);

Matrix batch_cost_matrix(const std::vector<FeatureSequence>& clips,
                         const std::vector<FeatureSequence>& captions,
                         const S2dtwParams& params,
                         const NegativeSpec& negatives);

// Contrastive objective over pairwise alignment costs, with gradients
// chained into every sequence item. When aug is set each sequence is
// shuffled once (clips then captions, in index order) using rng before any
// cost is computed.
LossOutput batch_loss(const Batch& batch, const S2dtwParams& params,
                      LossForm form = LossForm::log_of_sum,
                      const std::optional<AugmentConfig>& aug = std::nullopt,
                      RngStream* rng = nullptr);

}  // namespace twalign
