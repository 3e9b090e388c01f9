#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "twalign/distance.hpp"
#include "twalign/dtw.hpp"
#include "twalign/matrix.hpp"
#include "twalign/sequence.hpp"

namespace twalign {

// Stage order of the forward pipeline. smooth_first (smooth, then merge
// dummies, then DP) is the default; merge_first swaps the first two stages
// and is exposed for comparison.
enum class SmoothOrder { smooth_first, merge_first };

std::string to_string(SmoothOrder o);
SmoothOrder order_from_string(const std::string& s);

struct S2dtwParams {
  double gamma = 0.1;           // soft-min smoothing, > 0
  double dummy_distance = 0.5;  // skip threshold delta^phi
  DistanceMeasure measure = DistanceMeasure::cosine_dist;
  SmoothOrder order = SmoothOrder::smooth_first;
  bool smoothing = true;       // local neighborhood smoothing stage
  bool weak_alignment = true;  // dummy insertion stage

  void validate() const;
};

// Forward + backward state for one aligned pair. Matrices:
//   delta      raw n x m distances
//   delta_hat  output of the smoothing stage (n x m under smooth_first;
//              the augmented grid under merge_first; equals its input when
//              smoothing is off)
//   delta_phi  the matrix the DP ran on ((2n+1) x (2m+1) with weak
//              alignment, else delta_hat)
//   r          cumulative DP table over delta_phi (with boundary row/col)
//   m          mu = d cost / d r over the DP grid        (after backward)
//   m_hat      mu_hat = d cost / d delta over the raw grid (after backward)
//   dummy_mask 0/1 over the DP grid, 1 marking dummy rows/cols
struct S2dtwResult {
  double cost = 0.0;
  Matrix delta;
  Matrix delta_hat;
  Matrix delta_phi;
  Matrix r;
  Matrix m;
  Matrix m_hat;
  Matrix dummy_mask;
  bool has_gradients = false;
  S2dtwParams params;

  // smoothing-stage input; retained so the backward pass can replay the
  // stage exactly (equals delta under smooth_first, the raw augmented grid
  // under merge_first).
  Matrix smooth_input;
};

// Local neighborhood smoothing: each entry plus the soft-min of its three
// causal neighbors; out-of-range neighbors are excluded, and the empty
// neighbor set at (1,1) contributes 0 so delta_hat(1,1) = delta(1,1).
Matrix smooth(const Matrix& delta, double gamma);

// Reverse-mode through smooth(): g_out is d cost / d delta_hat; returns
// d cost / d delta. delta_hat must be the stored forward output.
Matrix smooth_backward(const Matrix& delta, const Matrix& delta_hat,
                       const Matrix& g_out, double gamma);

// Interleave dummy rows/columns holding dummy_distance: output is
// (2n+1) x (2m+1), real entries at even (1-based) positions, and the 0/1
// mask marks dummies.
std::pair<Matrix, Matrix> insert_dummies(const Matrix& delta_hat,
                                         double dummy_distance);

S2dtwResult s2dtw_forward(const Matrix& delta, const S2dtwParams& params);
S2dtwResult s2dtw_forward(const FeatureSequence& x, const FeatureSequence& y,
                          const S2dtwParams& params);

// Fills m and m_hat by exact reverse-mode through the forward stages.
void s2dtw_backward(S2dtwResult& result);

struct EmbeddingGrads {
  std::vector<std::vector<double>> x;  // one gradient vector per item of X
  std::vector<std::vector<double>> y;
};

// Chains m_hat through the distance measure into per-item gradients.
EmbeddingGrads grad_wrt_embeddings(const S2dtwResult& result,
                                   const FeatureSequence& x,
                                   const FeatureSequence& y);

enum class PathVariant { softdtw, s2dtw };

// Soft alignment-path heatmap: m_hat for s2dtw, or the gradient matrix of a
// parallel plain Soft-DTW run on the same raw distances; normalized to [0,1]
// by the max entry (all-zero matrices pass through).
Matrix path_matrix(const S2dtwResult& result, PathVariant variant);

}  // namespace twalign
