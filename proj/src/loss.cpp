#include "twalign/loss.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twalign {

std::string to_string(LossForm f) {
  return f == LossForm::log_of_sum ? "log_of_sum" : "sum_of_logs";
}

LossForm loss_form_from_string(const std::string& s) {
  if (s == "log_of_sum") return LossForm::log_of_sum;
  if (s == "sum_of_logs") return LossForm::sum_of_logs;
  throw ArgumentError("unknown loss form: " + s);
}

std::vector<std::size_t> negative_set(std::size_t i, std::size_t batch_size,
                                      const NegativeSpec& spec) {
  if (i >= batch_size) throw ArgumentError("negative_set: index out of range");
  switch (spec.policy) {
    case NegativePolicy::none:
      return {};
    case NegativePolicy::custom: {
      if (i >= spec.lists.size())
        throw ArgumentError("negative_set: custom list missing for index");
      for (std::size_t j : spec.lists[i])
        if (j >= batch_size)
          throw ArgumentError("negative_set: custom index out of range");
      return spec.lists[i];
    }
    default: {
      std::vector<std::size_t> out;
      out.reserve(batch_size - 1);
      for (std::size_t j = 0; j < batch_size; ++j)
        if (j != i) out.push_back(j);
      return out;
    }
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> active_rows(const Batch& batch) {
  if (batch.negatives.policy == NegativePolicy::custom &&
      !batch.negatives.active_rows.empty())
    return batch.negatives.active_rows;
  std::vector<std::size_t> out(batch.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

// Flattened list of (i,j) cells that enter the objective.
std::vector<std::pair<std::size_t, std::size_t>> evaluated_cells(
    const Batch& batch) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i : active_rows(batch)) {
    cells.emplace_back(i, i);
    for (std::size_t j : negative_set(i, batch.size(), batch.negatives))
      cells.emplace_back(i, j);
  }
  return cells;
}

Matrix fill_costs(const std::vector<FeatureSequence>& clips,
                  const std::vector<FeatureSequence>& captions,
                  const S2dtwParams& params,
                  const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                  bool parallel) {
  Matrix costs(clips.size(), captions.size(), kNaN);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(cells.size());
         ++k) {
      const auto [i, j] = cells[static_cast<std::size_t>(k)];
      costs(i, j) = s2dtw_forward(clips[i], captions[j], params).cost;
    }
  } else {
    for (const auto& [i, j] : cells)
      costs(i, j) = s2dtw_forward(clips[i], captions[j], params).cost;
  }
  return costs;
}

}  // namespace

Matrix batch_cost_matrix_serial(const std::vector<FeatureSequence>& clips,
                                const std::vector<FeatureSequence>& captions,
                                const S2dtwParams& params,
                                const NegativeSpec& negatives) {
  Batch probe{clips, captions, negatives};
  return fill_costs(clips, captions, params, evaluated_cells(probe), false);
}

Matrix batch_cost_matrix(const std::vector<FeatureSequence>& clips,
                         const std::vector<FeatureSequence>& captions,
                         const S2dtwParams& params,
                         const NegativeSpec& negatives) {
  Batch probe{clips, captions, negatives};
  return fill_costs(clips, captions, params, evaluated_cells(probe), true);
}

LossOutput batch_loss(const Batch& batch, const S2dtwParams& params,
                      LossForm form, const std::optional<AugmentConfig>& aug,
                      RngStream* rng) {
  const std::size_t b = batch.size();
  if (b == 0) throw ArgumentError("batch_loss: empty batch");
  if (batch.captions.size() != b)
    throw ArgumentError("batch_loss: clips/captions count mismatch");
  if (aug && rng == nullptr)
    throw ArgumentError("batch_loss: augmentation requires an rng stream");

  LossOutput out;
  out.applied_pi_x.reserve(b);
  out.applied_pi_y.reserve(b);

  // one shuffle per sequence per call, clips first, then captions
  std::vector<FeatureSequence> clips, captions;
  clips.reserve(b);
  captions.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    if (aug) {
      const auto dist = permutation_distribution(
          batch.clips[i], aug->window, aug->tau, params.measure, aug->strategy);
      Permutation pi = sample_permutation(dist, *rng);
      clips.push_back(apply_permutation(batch.clips[i], pi));
      out.applied_pi_x.push_back(std::move(pi));
    } else {
      clips.push_back(batch.clips[i]);
      out.applied_pi_x.push_back(Permutation::identity(batch.clips[i].length()));
    }
  }
  for (std::size_t i = 0; i < b; ++i) {
    if (aug) {
      const auto dist =
          permutation_distribution(batch.captions[i], aug->window, aug->tau,
                                   params.measure, aug->strategy);
      Permutation pi = sample_permutation(dist, *rng);
      captions.push_back(apply_permutation(batch.captions[i], pi));
      out.applied_pi_y.push_back(std::move(pi));
    } else {
      captions.push_back(batch.captions[i]);
      out.applied_pi_y.push_back(
          Permutation::identity(batch.captions[i].length()));
    }
  }

  const auto cells = evaluated_cells(batch);
  const auto rows = active_rows(batch);

  // forward + backward per evaluated pair, independent across cells
  std::vector<S2dtwResult> results(cells.size());
  std::vector<EmbeddingGrads> grads(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(cells.size());
       ++k) {
    const auto [i, j] = cells[static_cast<std::size_t>(k)];
    auto& res = results[static_cast<std::size_t>(k)];
    res = s2dtw_forward(clips[i], captions[j], params);
    s2dtw_backward(res);
    grads[static_cast<std::size_t>(k)] =
        grad_wrt_embeddings(res, clips[i], captions[j]);
  }

  out.cost_matrix = Matrix(b, b, kNaN);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [i, j] = cells[k];
    const double c = results[k].cost;
    if (!std::isfinite(c))
      throw NumericError("batch_loss: non-finite alignment cost");
    out.cost_matrix(i, j) = c;
  }
  out.positive_costs.assign(b, kNaN);
  for (std::size_t i : rows) out.positive_costs[i] = out.cost_matrix(i, i);

  // softmax ratios; exponentials are shifted per row for stability
  std::vector<double> lo(b, 0.0), z(b, 0.0), dl_dratio(b, 0.0);
  out.ratios.assign(b, kNaN);
  const bool positives_only = batch.negatives.policy == NegativePolicy::none;
  double loss = 0.0;
  if (positives_only) {
    for (std::size_t i : rows) loss += out.cost_matrix(i, i);
  } else {
    double ratio_sum = 0.0;
    for (std::size_t i : rows) {
      const auto neg = negative_set(i, b, batch.negatives);
      lo[i] = out.cost_matrix(i, i);
      for (std::size_t j : neg) lo[i] = std::min(lo[i], out.cost_matrix(i, j));
      z[i] = std::exp(-(out.cost_matrix(i, i) - lo[i]));
      for (std::size_t j : neg)
        z[i] += std::exp(-(out.cost_matrix(i, j) - lo[i]));
      out.ratios[i] = std::exp(-(out.cost_matrix(i, i) - lo[i])) / z[i];
      ratio_sum += out.ratios[i];
    }
    if (form == LossForm::log_of_sum) {
      loss = -std::log(ratio_sum);
    } else {
      for (std::size_t i : rows) loss += -std::log(out.ratios[i]);
    }
    for (std::size_t i : rows)
      dl_dratio[i] = form == LossForm::log_of_sum ? -1.0 / ratio_sum
                                                  : -1.0 / out.ratios[i];
  }
  if (!std::isfinite(loss)) throw NumericError("batch_loss: non-finite loss");
  out.loss = loss;

  // accumulate weighted embedding gradients in deterministic cell order,
  // scattered back through the applied permutations
  out.grad_clips.reserve(b);
  out.grad_captions.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    out.grad_clips.emplace_back(batch.clips[i].length(), batch.clips[i].dim());
    out.grad_captions.emplace_back(batch.captions[i].length(),
                                   batch.captions[i].dim());
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [i, j] = cells[k];
    double w;
    if (positives_only) {
      w = 1.0;
    } else {
      const double ratio = out.ratios[i];
      if (i == j) {
        w = dl_dratio[i] * (-ratio * (1.0 - ratio));
      } else {
        const double soft_j = std::exp(-(out.cost_matrix(i, j) - lo[i])) / z[i];
        w = dl_dratio[i] * ratio * soft_j;
      }
    }
    const auto& g = grads[k];
    const Permutation& pix = out.applied_pi_x[i];
    const Permutation& piy = out.applied_pi_y[j];
    for (std::size_t t = 0; t < g.x.size(); ++t)
      for (std::size_t c = 0; c < g.x[t].size(); ++c)
        out.grad_clips[i](pix(t), c) += w * g.x[t][c];
    for (std::size_t t = 0; t < g.y.size(); ++t)
      for (std::size_t c = 0; c < g.y[t].size(); ++c)
        out.grad_captions[j](piy(t), c) += w * g.y[t][c];
  }
  return out;
}

}  // namespace twalign
