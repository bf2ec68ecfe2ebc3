#pragma once

// Independent reference computations for tests. None of these call the
// library's solvers or kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values from the eigendecomposition of the smaller Gram matrix,
/// sorted nonincreasing. Resolves values down to about sqrt(eps) * sigma_1.
inline Vector gram_singular_values(const Matrix& a) {
  const Matrix gram = a.rows() >= a.cols() ? Matrix(a.transpose() * a) : Matrix(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  Vector s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

/// Two-sided Jacobi SVD from Eigen; accurate enough for rank checks.
inline Vector singular_values(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues(); }

/// Sum of squared singular values past index r (Gram route).
inline double discarded_energy(const Matrix& a, Eigen::Index r) {
  const Vector s = gram_singular_values(a);
  double sum = 0.0;
  for (Eigen::Index k = r; k < s.size(); ++k) sum += s(k) * s(k);
  return sum;
}

/// W = Z H^T (H H^T)^{-1}.
inline Matrix ls_left_normal(const Matrix& z, const Matrix& h) {
  const Matrix g = h * h.transpose();
  return (g.llt().solve(h * z.transpose())).transpose();
}

/// H = (W^T W)^{-1} W^T Z.
inline Matrix ls_right_normal(const Matrix& z, const Matrix& w) {
  const Matrix g = w.transpose() * w;
  return g.llt().solve(w.transpose() * z);
}

/// ||x - max(0, theta)||_F / ||x||_F by explicit loops.
inline double relative_error_loop(const Matrix& x, const Matrix& theta) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double p = theta(i, j) > 0.0 ? theta(i, j) : 0.0;
      num += (x(i, j) - p) * (x(i, j) - p);
      den += x(i, j) * x(i, j);
    }
  return std::sqrt(num) / std::sqrt(den);
}

/// Column-wise NNLS by enumerating every support of the coefficient vector.
inline Matrix nnls_enumerate(const Matrix& a, const Matrix& b) {
  const Eigen::Index r = a.cols();
  Matrix out = Matrix::Zero(r, b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    double best = (b.col(j)).squaredNorm();
    Vector best_v = Vector::Zero(r);
    for (unsigned mask = 1; mask < (1u << r); ++mask) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index k = 0; k < r; ++k)
        if (mask & (1u << k)) idx.push_back(k);
      Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t t = 0; t < idx.size(); ++t) sub.col(static_cast<Eigen::Index>(t)) = a.col(idx[t]);
      const Vector coef = sub.colPivHouseholderQr().solve(b.col(j));
      if ((coef.array() < 0.0).any()) continue;
      const double res = (b.col(j) - sub * coef).squaredNorm();
      if (res < best) {
        best = res;
        best_v.setZero();
        for (std::size_t t = 0; t < idx.size(); ++t) best_v(idx[t]) = coef(static_cast<Eigen::Index>(t));
      }
    }
    out.col(j) = best_v;
  }
  return out;
}

/// Golden-section minimizer of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
