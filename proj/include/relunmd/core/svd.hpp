#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "relunmd/core/errors.hpp"
#include "relunmd/core/matrix.hpp"
#include "relunmd/core/rng.hpp"

namespace relunmd {

/// Thin SVD factors: a ~= u * diag(singular_values) * v^T.
struct TsvdResult {
  Matrix u;                // m x r, orthonormal columns
  Vector singular_values;  // length r, nonincreasing, >= 0
  Matrix v;                // n x r, orthonormal columns

  Index rank() const { return singular_values.size(); }

  Matrix reconstruct() const {
    return (u * singular_values.asDiagonal()) * v.transpose();
  }
};

struct TsvdOptions {
  /// Block path: stop when no leading singular value moves by more than
  /// tol * sigma_1 between two subspace sweeps.
  double tol = 1e-10;
  int max_iter = 100;
  /// min(m, n) at or below this goes through one-sided Jacobi.
  Index jacobi_max_dim = 64;
  Index oversampling = 10;
  int power_iters = 2;
  std::uint64_t seed = 0x5eedULL;
};

/// Thrown when the iteration budget runs out; carries the best iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, TsvdResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const TsvdResult& best() const { return best_; }

 private:
  TsvdResult best_;
};

namespace detail {

// Orthonormal basis of the column space of y (same number of columns).
inline Matrix orthonormalize(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

// Extend `u` (orthonormal columns marked in `valid`) to a full orthonormal set
// by Gram-Schmidt against the canonical basis.
inline void complete_orthonormal(Matrix& u, const std::vector<bool>& valid) {
  const Index m = u.rows();
  std::vector<Index> have;
  for (Index j = 0; j < u.cols(); ++j)
    if (valid[static_cast<std::size_t>(j)]) have.push_back(j);
  Index candidate = 0;
  for (Index j = 0; j < u.cols(); ++j) {
    if (valid[static_cast<std::size_t>(j)]) continue;
    while (candidate < m) {
      Vector e = Vector::Unit(m, candidate++);
      for (int pass = 0; pass < 2; ++pass)
        for (Index k : have) e -= u.col(k).dot(e) * u.col(k);
      const double nrm = e.norm();
      if (nrm > 0.5) {
        u.col(j) = e / nrm;
        have.push_back(j);
        break;
      }
    }
  }
}

// One-sided (Hestenes) Jacobi on a matrix with rows >= cols. Returns all
// cols singular triplets, sorted descending.
inline TsvdResult jacobi_tall(const Matrix& a, int max_sweeps) {
  const Index m = a.rows();
  const Index n = a.cols();

  // QR preconditioning: rotate the small triangular factor instead of the
  // tall matrix.
  Matrix q_basis;
  Matrix work;
  if (m > n) {
    Eigen::HouseholderQR<Matrix> qr(a);
    q_basis = qr.householderQ() * Matrix::Identity(m, n);
    work = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    work = a;
  }

  Matrix v = Matrix::Identity(n, n);
  const double threshold =
      std::sqrt(static_cast<double>(work.rows())) * std::numeric_limits<double>::epsilon();

  bool converged = (n < 2);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double alpha = work.col(p).squaredNorm();
        const double beta = work.col(q).squaredNorm();
        const double gamma = work.col(p).dot(work.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= threshold * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < work.rows(); ++i) {
          const double wp = work(i, p);
          const double wq = work(i, q);
          work(i, p) = c * wp - s * wq;
          work(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }

  Vector sigma(n);
  for (Index j = 0; j < n; ++j) sigma(j) = work.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return sigma(i) > sigma(j); });

  TsvdResult out;
  out.singular_values.resize(n);
  out.u.resize(work.rows(), n);
  out.v.resize(n, n);
  std::vector<bool> valid(static_cast<std::size_t>(n), true);
  for (Index k = 0; k < n; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    out.singular_values(k) = sigma(j);
    out.v.col(k) = v.col(j);
    if (sigma(j) > std::numeric_limits<double>::min()) {
      out.u.col(k) = work.col(j) / sigma(j);
    } else {
      out.u.col(k).setZero();
      valid[static_cast<std::size_t>(k)] = false;
    }
  }
  if (std::find(valid.begin(), valid.end(), false) != valid.end())
    complete_orthonormal(out.u, valid);
  if (m > n) out.u = q_basis * out.u;

  if (!converged) {
    throw ConvergenceError("jacobi_svd: sweep budget exhausted", std::move(out));
  }
  return out;
}

inline TsvdResult leading(const TsvdResult& full, Index r) {
  return {full.u.leftCols(r), full.singular_values.head(r), full.v.leftCols(r)};
}

}  // namespace detail

/// Thin SVD of `a` (min(m, n) triplets) by one-sided Jacobi.
inline TsvdResult jacobi_svd(const Matrix& a, int max_sweeps = 60) {
  require_nonempty(a, "jacobi_svd");
  require_finite(a, "jacobi_svd");
  if (a.rows() >= a.cols()) return detail::jacobi_tall(a, max_sweeps);
  TsvdResult t = detail::jacobi_tall(a.transpose(), max_sweeps);
  return {std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

/**
 * Rank-r truncated SVD.
 *
 * min(m, n) <= opts.jacobi_max_dim: exact one-sided Jacobi, truncated.
 * Otherwise: randomized range finder (oversampling p, q power iterations),
 * then block subspace iteration with Rayleigh-Ritz until the leading r
 * singular values stabilise to opts.tol. Deterministic for fixed options.
 */
inline TsvdResult tsvd(const Matrix& a, Index r, const TsvdOptions& opts = {}) {
  require_nonempty(a, "tsvd");
  const Index m = a.rows();
  const Index n = a.cols();
  const Index min_dim = std::min(m, n);
  if (r < 1 || r > min_dim) {
    throw ParameterError("tsvd: rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(min_dim) + "]");
  }
  require_finite(a, "tsvd");

  if (min_dim <= opts.jacobi_max_dim) {
    try {
      return detail::leading(jacobi_svd(a), r);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(e.what(), detail::leading(e.best(), r));
    }
  }

  const Index k = std::min(min_dim, r + opts.oversampling);
  Rng rng(opts.seed, Stream::sketch);
  Matrix q = detail::orthonormalize(a * rng.normal_matrix(n, k));
  for (int i = 0; i < opts.power_iters; ++i) {
    q = detail::orthonormalize(a.transpose() * q);
    q = detail::orthonormalize(a * q);
  }

  TsvdResult best;
  Vector previous;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Matrix bt = a.transpose() * q;  // n x k, equals (q^T a)^T
    // bt = P diag(s) Qs^T, so q^T a = Qs diag(s) P^T.
    const TsvdResult small = jacobi_svd(bt);
    best = {q * small.v.leftCols(r), small.singular_values.head(r), small.u.leftCols(r)};
    if (iter > 0) {
      const double scale = best.singular_values(0);
      const double change = (best.singular_values - previous).cwiseAbs().maxCoeff();
      if (change <= opts.tol * scale) return best;
    }
    previous = best.singular_values;
    q = detail::orthonormalize(a * detail::orthonormalize(bt));
  }
  throw ConvergenceError("tsvd: subspace iteration did not reach tol within " +
                             std::to_string(opts.max_iter) + " iterations",
                         std::move(best));
}

inline TsvdResult tsvd(const Matrix& a, Index r, double tol) {
  TsvdOptions opts;
  opts.tol = tol;
  return tsvd(a, r, opts);
}

/// Economy SVD with all min(m, n) triplets (divide and conquer).
inline TsvdResult full_svd(const Matrix& a) {
  require_nonempty(a, "full_svd");
  require_finite(a, "full_svd");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Vector singular_values(const Matrix& a) {
  require_nonempty(a, "singular_values");
  require_finite(a, "singular_values");
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

inline double nuclear_norm(const Matrix& a) { return singular_values(a).sum(); }

}  // namespace relunmd
