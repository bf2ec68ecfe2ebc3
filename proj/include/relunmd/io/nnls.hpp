#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "relunmd/core/matrix.hpp"

namespace relunmd {

struct NnlsResult {
  Matrix solution;  // r x n, entrywise >= 0
  bool converged = false;
  Index iterations = 0;
  /// ||projected gradient||_F of the returned iterate.
  double kkt_residual = 0.0;
};

namespace detail {

// Gradient of 1/2 ||b - a v||^2 is gram * v - atb; zero it where the bound
// v >= 0 is active and the gradient points outward.
inline double projected_gradient_norm(const Matrix& v, const Matrix& grad) {
  double sum = 0.0;
  for (Index j = 0; j < v.cols(); ++j)
    for (Index i = 0; i < v.rows(); ++i) {
      const double g = v(i, j) > 0.0 ? grad(i, j) : std::min(grad(i, j), 0.0);
      sum += g * g;
    }
  return std::sqrt(sum);
}

}  // namespace detail

/**
 * min_{V >= 0} ||b - a V||_F by accelerated projected gradient on the whole
 * block V, with momentum restart whenever the objective goes up. Stops once
 * ||projected gradient||_F <= tol * ||a^T b||_F. Starts from the clipped
 * unconstrained least-squares solution.
 */
inline NnlsResult nnls(const Matrix& a, const Matrix& b, double tol = 1e-8, Index max_iter = 5000) {
  if (a.rows() != b.rows()) throw ShapeError("nnls: a and b row counts differ");
  require_nonempty(a, "nnls");
  require_finite(a, "nnls");
  require_finite(b, "nnls");
  if (a.norm() == 0.0) throw ParameterError("nnls: a is zero");

  const Matrix gram = a.transpose() * a;
  const Matrix atb = a.transpose() * b;
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double target = tol * atb.norm();

  // 1/2 <V, G V> - <V, A^T b>; the constant 1/2 ||b||^2 is dropped.
  auto objective = [&](const Matrix& v) { return 0.5 * v.cwiseProduct(gram * v).sum() - v.cwiseProduct(atb).sum(); };

  Matrix v = gram.completeOrthogonalDecomposition().solve(atb).cwiseMax(0.0);
  if (!v.allFinite()) v.setZero(gram.rows(), b.cols());
  double f = objective(v);

  NnlsResult best{v, false, 0, detail::projected_gradient_norm(v, gram * v - atb)};
  double best_f = f;
  if (best.kkt_residual <= target) {
    best.converged = true;
    return best;
  }

  Matrix y = v;
  double t = 1.0;
  for (Index it = 1; it <= max_iter; ++it) {
    Matrix next = (y - (gram * y - atb) / lipschitz).cwiseMax(0.0);
    double f_next = objective(next);
    if (f_next > f) {
      // restart from the last iterate with a plain projected gradient step
      t = 1.0;
      next = (v - (gram * v - atb) / lipschitz).cwiseMax(0.0);
      f_next = objective(next);
      y = next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - v);
      t = t_next;
    }
    v = std::move(next);
    f = f_next;

    const double kkt = detail::projected_gradient_norm(v, gram * v - atb);
    if (f <= best_f) {
      best_f = f;
      best.solution = v;
      best.kkt_residual = kkt;
    }
    best.iterations = it;
    if (kkt <= target) {
      best.solution = v;
      best.kkt_residual = kkt;
      best.converged = true;
      return best;
    }
  }
  return best;
}

struct CompressionError {
  double value = 1.0;
  bool converged = true;
};

/// min_{V >= 0} ||x - max(0, u_hat) V||_F / ||x||_F, with x (d x N) and u_hat (d x k).
inline CompressionError nmf_compression_error(const Matrix& x, const Matrix& u_hat, double tol = 1e-8,
                                              Index max_iter = 5000) {
  if (x.rows() != u_hat.rows()) throw ShapeError("nmf_compression_error: x and u_hat row counts differ");
  const double x_norm = x.norm();
  if (x_norm == 0.0) throw ParameterError("nmf_compression_error: x is zero");
  const Matrix basis = relu(u_hat);
  if (basis.norm() == 0.0) return {1.0, true};
  const NnlsResult fit = nnls(basis, x, tol, max_iter);
  return {(x - basis * fit.solution).norm() / x_norm, fit.converged};
}

}  // namespace relunmd
