#pragma once

#include "relunmd/core/matrix.hpp"
#include "relunmd/solvers/types.hpp"

namespace relunmd {

/// Exact minimizer of ||Z - theta||_F subject to max(0, Z) = x:
/// Z = x on I+, min(0, theta) on I0.
inline Matrix z_update(const Matrix& x, const SparsityPattern& pattern, const Matrix& theta) {
  require_same_shape(x, theta, "z_update");
  if (pattern.rows() != x.rows() || pattern.cols() != x.cols())
    throw ShapeError("z_update: pattern shape mismatch");
  return pattern.positive().select(x, theta.cwiseMin(0.0));
}

/// Heavy-ball push: current + alpha * prior_difference, where the caller
/// supplies prior_difference = Z^k - Z^{k-1}.
inline Matrix polyak_extrapolate(const Matrix& current, const Matrix& prior_difference, double alpha) {
  require_same_shape(current, prior_difference, "polyak_extrapolate");
  return current + alpha * prior_difference;
}

/// next + beta * (next - previous). Entries where next == previous are
/// returned unchanged bit for bit.
inline Matrix nesterov_extrapolate(const Matrix& next, const Matrix& previous, double beta) {
  require_same_shape(next, previous, "nesterov_extrapolate");
  if (beta < 0.0) throw ParameterError("nesterov_extrapolate: beta must be >= 0");
  return next + beta * (next - previous);
}

}  // namespace relunmd
