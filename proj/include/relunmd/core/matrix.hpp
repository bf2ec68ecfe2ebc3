#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "relunmd/core/errors.hpp"

namespace relunmd {

// Dense real matrix used for X, Z, Theta, W, H. Column-major storage, (i,j)
// indexed semantics.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline std::string shape_string(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + shape_string(a) + " vs " +
                     shape_string(b) + ")");
  }
}

inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ParameterError(std::string(what) + ": matrix contains NaN or Inf");
  }
}

inline void require_nonempty(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw ParameterError(std::string(what) + ": matrix has a zero dimension");
  }
}

/// Elementwise max(0, a).
inline Matrix relu(const Matrix& a) { return a.cwiseMax(0.0); }

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_inner");
  return a.cwiseProduct(b).sum();
}

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

/// ||x - max(0, theta)||_F / ||x||_F
inline double relative_error(const Matrix& x, const Matrix& theta) {
  require_same_shape(x, theta, "relative_error");
  require_finite(x, "relative_error: x");
  require_finite(theta, "relative_error: theta");
  const double denom = x.norm();
  if (denom == 0.0) {
    throw ParameterError("relative_error: ||x||_F = 0, metric undefined");
  }
  return (x - theta.cwiseMax(0.0)).norm() / denom;
}

/// Elementwise equality within an absolute tolerance.
inline bool approx_equal(const Matrix& a, const Matrix& b, double abs_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return ((a - b).cwiseAbs().array() <= abs_tol).all();
}

}  // namespace relunmd
