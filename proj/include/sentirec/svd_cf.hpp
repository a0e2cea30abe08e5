#pragma once

// SVD-based collaborative filtering.
//
// Missing cells are filled with their column mean, each row is centered on its
// mean, the centered matrix is truncated to rank k, and the row means are added
// back. Predictions are read off the reconstruction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "sentirec/detail/numeric.hpp"
#include "sentirec/error.hpp"
#include "sentirec/ratings_matrix.hpp"

namespace sentirec {

struct SvdFactors {
  DenseMatrix u;                     // m x k, orthonormal columns
  std::vector<double> singular;      // k, descending
  DenseMatrix v;                     // n x k, orthonormal columns

  std::size_t rank() const noexcept { return singular.size(); }

  DenseMatrix reconstruct() const {
    DenseMatrix out(u.rows(), v.rows());
    for (std::size_t r = 0; r < u.rows(); ++r)
      for (std::size_t c = 0; c < v.rows(); ++c) {
        double s = 0.0;
        for (std::size_t f = 0; f < singular.size(); ++f) s += u(r, f) * singular[f] * v(c, f);
        out(r, c) = s;
      }
    return out;
  }
};

namespace svd_detail {

inline constexpr int kMaxSweeps = 80;

// One-sided Jacobi on the columns of `a` (rows >= cols). On return the columns
// of `a` are mutually orthogonal and `v` holds the accumulated rotations.
inline void orthogonalize_columns(DenseMatrix& a, DenseMatrix& v) {
  const std::size_t m = a.rows(), n = a.cols();
  v = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double eps = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(m, 1));
  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double negligible = total * 1e-30;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += a(r, p) * a(r, p);
          beta += a(r, q) * a(r, q);
          gamma += a(r, p) * a(r, q);
        }
        if (alpha <= negligible || beta <= negligible) continue;
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double ap = a(r, p), aq = a(r, q);
          a(r, p) = c * ap - s * aq;
          a(r, q) = s * ap + c * aq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    if (!rotated) return;
  }
  throw Error(ErrorKind::numerical_failure,
              "Jacobi SVD did not converge within " + std::to_string(kMaxSweeps) + " sweeps");
}

// Replaces column `col` of `u` by a unit vector orthogonal to columns [0, col).
inline void complete_basis_column(DenseMatrix& u, std::size_t col) {
  const std::size_t m = u.rows();
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<double> cand(m, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < col; ++k) {
        double d = 0.0;
        for (std::size_t r = 0; r < m; ++r) d += u(r, k) * cand[r];
        for (std::size_t r = 0; r < m; ++r) cand[r] -= d * u(r, k);
      }
    double norm = 0.0;
    for (double x : cand) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.5) {
      for (std::size_t r = 0; r < m; ++r) u(r, col) = cand[r] / norm;
      return;
    }
  }
}

}  // namespace svd_detail

/// The k leading singular triplets of `a`, via one-sided Jacobi. Deterministic.
inline SvdFactors truncated_svd(const DenseMatrix& a, std::size_t k) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) throw Error(ErrorKind::parameter, "cannot factor an empty matrix");
  if (k < 1 || k > std::min(m, n)) {
    throw Error(ErrorKind::parameter, "rank " + std::to_string(k) + " outside [1, " + std::to_string(std::min(m, n)) + "]");
  }
  for (double x : a.data())
    if (!std::isfinite(x)) throw Error(ErrorKind::numerical_failure, "matrix contains non-finite values");

  // Work on the tall orientation; swap U and V back afterwards.
  const bool flip = m < n;
  DenseMatrix work = flip ? a.transposed() : a;
  DenseMatrix rot;
  svd_detail::orthogonalize_columns(work, rot);
  const std::size_t rows = work.rows(), cols = work.cols();

  std::vector<double> norms(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += work(r, c) * work(r, c);
    norms[c] = std::sqrt(s);
  }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double cutoff = std::max(norms[order[0]], 1.0) * 1e-13 * static_cast<double>(rows);
  DenseMatrix left(rows, cols), right(cols, cols);
  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t src = order[j];
    const bool zero = norms[src] <= cutoff;
    sigma[j] = zero ? 0.0 : norms[src];
    for (std::size_t r = 0; r < cols; ++r) right(r, j) = rot(r, src);
    if (!zero) {
      for (std::size_t r = 0; r < rows; ++r) left(r, j) = work(r, src) / norms[src];
    } else {
      svd_detail::complete_basis_column(left, j);
    }
  }

  SvdFactors out;
  out.singular.assign(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(k));
  DenseMatrix uk(rows, k), vk(cols, k);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t r = 0; r < rows; ++r) uk(r, f) = left(r, f);
    for (std::size_t r = 0; r < cols; ++r) vk(r, f) = right(r, f);
  }
  if (flip) {
    out.u = std::move(vk);
    out.v = std::move(uk);
  } else {
    out.u = std::move(uk);
    out.v = std::move(vk);
  }
  return out;
}

struct CenteredMatrix {
  DenseMatrix centered;
  std::vector<double> row_means;
  std::vector<double> col_means;
};

/// Mean of every observed cell.
inline double observed_mean(const RatingsMatrix& matrix) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t u = 0; u < matrix.rows(); ++u)
    for (std::size_t i = 0; i < matrix.cols(); ++i)
      if (const auto& v = matrix.at(u, i)) sum += *v, ++count;
  if (count == 0) throw Error(ErrorKind::empty_input, "matrix has no observed cells");
  return sum / static_cast<double>(count);
}

/// Per-column means of observed cells; all-missing columns take the global mean.
inline std::vector<double> column_means(const RatingsMatrix& matrix) {
  const double global = observed_mean(matrix);
  std::vector<double> means(matrix.cols(), global);
  for (std::size_t i = 0; i < matrix.cols(); ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t u = 0; u < matrix.rows(); ++u)
      if (const auto& v = matrix.at(u, i)) sum += *v, ++count;
    if (count > 0) means[i] = sum / static_cast<double>(count);
  }
  return means;
}

inline CenteredMatrix impute_and_center(const RatingsMatrix& matrix) {
  CenteredMatrix out;
  out.col_means = column_means(matrix);
  const std::size_t m = matrix.rows(), n = matrix.cols();
  out.centered = DenseMatrix(m, n);
  out.row_means.assign(m, 0.0);
  for (std::size_t u = 0; u < m; ++u) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = matrix.at(u, i);
      out.centered(u, i) = v ? *v : out.col_means[i];
      sum += out.centered(u, i);
    }
    out.row_means[u] = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.centered(u, i) -= out.row_means[u];
  }
  return out;
}

struct CfModel {
  DenseMatrix x_hat;
  std::vector<double> row_means;
  std::vector<double> col_means;
  std::size_t rank = 0;
};

inline CfModel fit(const RatingsMatrix& matrix, std::size_t k) {
  auto prepared = impute_and_center(matrix);
  const auto factors = truncated_svd(prepared.centered, k);
  CfModel model;
  model.x_hat = factors.reconstruct();
  for (std::size_t u = 0; u < model.x_hat.rows(); ++u)
    for (std::size_t i = 0; i < model.x_hat.cols(); ++i) model.x_hat(u, i) += prepared.row_means[u];
  model.row_means = std::move(prepared.row_means);
  model.col_means = std::move(prepared.col_means);
  model.rank = k;
  return model;
}

/// Raw reconstruction value at zero-based (u, i), on the matrix's own scale.
inline double predict_rating(const CfModel& model, std::size_t u, std::size_t i) {
  if (u >= model.x_hat.rows() || i >= model.x_hat.cols()) {
    throw Error(ErrorKind::parameter, "prediction index outside the model matrix");
  }
  return model.x_hat(u, i);
}

/// Rounds half up and clamps into the 1..5 star scale.
inline int clamp_to_scale(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::parameter, "cannot map a non-finite value to stars");
  return static_cast<int>(std::clamp(detail::round_half_up(value), 1.0, 5.0));
}

}  // namespace sentirec
