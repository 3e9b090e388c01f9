#include "twalign/s2dtw.hpp"

#include <cmath>

#include "twalign/softmin.hpp"

namespace twalign {

std::string to_string(SmoothOrder o) {
  return o == SmoothOrder::smooth_first ? "smooth-first" : "merge-first";
}

SmoothOrder order_from_string(const std::string& s) {
  if (s == "smooth-first" || s == "smooth_first") return SmoothOrder::smooth_first;
  if (s == "merge-first" || s == "merge_first") return SmoothOrder::merge_first;
  throw ArgumentError("unknown stage order: " + s);
}

void S2dtwParams::validate() const {
  if (!(gamma > 0.0)) throw ArgumentError("s2dtw: gamma must be > 0");
  if (!std::isfinite(dummy_distance))
    throw ArgumentError("s2dtw: dummy distance must be finite");
}

Matrix smooth(const Matrix& delta, double gamma) {
  const std::size_t n = delta.rows(), m = delta.cols();
  Matrix out(n, m);
  double nb[3];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (std::isnan(delta(i, j)))
        throw NumericError("smooth: NaN entry at (" + std::to_string(i + 1) +
                           "," + std::to_string(j + 1) + ")");
      std::size_t k = 0;
      if (i > 0) nb[k++] = delta(i - 1, j);
      if (j > 0) nb[k++] = delta(i, j - 1);
      if (i > 0 && j > 0) nb[k++] = delta(i - 1, j - 1);
      // empty neighbor set only at (1,1); its soft-min term is 0
      out(i, j) = delta(i, j) + (k ? softmin({nb, k}, gamma) : 0.0);
    }
  }
  return out;
}

Matrix smooth_backward(const Matrix& delta, const Matrix& delta_hat,
                       const Matrix& g_out, double gamma) {
  if (!delta.same_shape(delta_hat) || !delta.same_shape(g_out))
    throw ShapeError("smooth_backward: shape mismatch");
  const std::size_t n = delta.rows(), m = delta.cols();
  Matrix g(n, m);
  // delta(i,j) reaches the cost through delta_hat(i,j) directly (weight 1)
  // and through the soft-min term of each of its three forward successors,
  // whose soft-min value is recovered as delta_hat(k,l) - delta(k,l).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = g_out(i, j);
      const double dij = delta(i, j);
      if (i + 1 < n)
        acc += g_out(i + 1, j) *
               std::exp((delta_hat(i + 1, j) - delta(i + 1, j) - dij) / gamma);
      if (j + 1 < m)
        acc += g_out(i, j + 1) *
               std::exp((delta_hat(i, j + 1) - delta(i, j + 1) - dij) / gamma);
      if (i + 1 < n && j + 1 < m)
        acc += g_out(i + 1, j + 1) *
               std::exp((delta_hat(i + 1, j + 1) - delta(i + 1, j + 1) - dij) /
                        gamma);
      g(i, j) = acc;
    }
  }
  return g;
}

std::pair<Matrix, Matrix> insert_dummies(const Matrix& delta_hat,
                                         double dummy_distance) {
  const std::size_t n = delta_hat.rows(), m = delta_hat.cols();
  Matrix aug(2 * n + 1, 2 * m + 1, dummy_distance);
  Matrix mask(2 * n + 1, 2 * m + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      aug(2 * i + 1, 2 * j + 1) = delta_hat(i, j);
      mask(2 * i + 1, 2 * j + 1) = 0.0;
    }
  return {std::move(aug), std::move(mask)};
}

S2dtwResult s2dtw_forward(const Matrix& delta, const S2dtwParams& params) {
  params.validate();
  S2dtwResult res;
  res.params = params;
  res.delta = delta;

  if (params.order == SmoothOrder::smooth_first) {
    res.smooth_input = delta;
    res.delta_hat = params.smoothing ? smooth(delta, params.gamma) : delta;
    if (params.weak_alignment) {
      auto [aug, mask] = insert_dummies(res.delta_hat, params.dummy_distance);
      res.delta_phi = std::move(aug);
      res.dummy_mask = std::move(mask);
    } else {
      res.delta_phi = res.delta_hat;
      res.dummy_mask = Matrix(delta.rows(), delta.cols(), 0.0);
    }
  } else {
    if (params.weak_alignment) {
      auto [aug, mask] = insert_dummies(delta, params.dummy_distance);
      res.smooth_input = std::move(aug);
      res.dummy_mask = std::move(mask);
    } else {
      res.smooth_input = delta;
      res.dummy_mask = Matrix(delta.rows(), delta.cols(), 0.0);
    }
    res.delta_hat = params.smoothing ? smooth(res.smooth_input, params.gamma)
                                     : res.smooth_input;
    res.delta_phi = res.delta_hat;
  }

  DtwResult dp = softdtw_forward(res.delta_phi, params.gamma);
  res.cost = dp.cost;
  res.r = std::move(dp.tables.r);
  return res;
}

S2dtwResult s2dtw_forward(const FeatureSequence& x, const FeatureSequence& y,
                          const S2dtwParams& params) {
  return s2dtw_forward(pairwise_distance(x, y, params.measure).values, params);
}

namespace {

Matrix extract_real_cells(const Matrix& aug, std::size_t n, std::size_t m) {
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = aug(2 * i + 1, 2 * j + 1);
  return out;
}

}  // namespace

void s2dtw_backward(S2dtwResult& res) {
  if (res.r.empty()) throw StateError("s2dtw_backward: forward fields missing");
  const S2dtwParams& p = res.params;
  const std::size_t n = res.delta.rows(), m = res.delta.cols();

  DpTables tables{res.r, p.gamma};
  res.m = softdtw_backward(res.delta_phi, tables, p.gamma);

  if (p.order == SmoothOrder::smooth_first) {
    Matrix g = p.weak_alignment ? extract_real_cells(res.m, n, m) : res.m;
    res.m_hat = p.smoothing
                    ? smooth_backward(res.smooth_input, res.delta_hat, g, p.gamma)
                    : std::move(g);
  } else {
    Matrix g = p.smoothing ? smooth_backward(res.smooth_input, res.delta_hat,
                                             res.m, p.gamma)
                           : res.m;
    // gradient w.r.t. the dummy constant is not tracked
    res.m_hat = p.weak_alignment ? extract_real_cells(g, n, m) : std::move(g);
  }
  res.has_gradients = true;
}

EmbeddingGrads grad_wrt_embeddings(const S2dtwResult& res,
                                   const FeatureSequence& x,
                                   const FeatureSequence& y) {
  if (!res.has_gradients)
    throw StateError("grad_wrt_embeddings: backward fields missing");
  const std::size_t n = x.length(), m = y.length(), d = x.dim();
  if (res.m_hat.rows() != n || res.m_hat.cols() != m)
    throw ShapeError("grad_wrt_embeddings: m_hat/sequence shape mismatch");
  EmbeddingGrads out;
  out.x.assign(n, std::vector<double>(d, 0.0));
  out.y.assign(m, std::vector<double>(d, 0.0));
  std::vector<double> gx(d), gy(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = res.m_hat(i, j);
      if (w == 0.0) continue;
      distance_grad(x.item(i), y.item(j), res.params.measure, gx, gy);
      for (std::size_t k = 0; k < d; ++k) {
        out.x[i][k] += w * gx[k];
        out.y[j][k] += w * gy[k];
      }
    }
  }
  return out;
}

Matrix path_matrix(const S2dtwResult& res, PathVariant variant) {
  Matrix m;
  if (variant == PathVariant::s2dtw) {
    if (!res.has_gradients)
      throw StateError("path_matrix: gradients absent; run s2dtw_backward");
    m = res.m_hat;
  } else {
    DtwResult dp = softdtw_forward(res.delta, res.params.gamma);
    m = softdtw_backward(res.delta, dp.tables, res.params.gamma);
  }
  const double mx = m.max_abs();
  if (mx > 0.0)
    for (double& v : m.data()) v /= mx;
  return m;
}

}  // namespace twalign
