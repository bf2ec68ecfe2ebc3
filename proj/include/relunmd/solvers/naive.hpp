#pragma once

#include <utility>

#include "relunmd/core/svd.hpp"
#include "relunmd/solvers/types.hpp"
#include "relunmd/solvers/updates.hpp"

namespace relunmd {
namespace detail {

// Alternating minimization over (Z, Theta). alpha > 0 adds the heavy-ball
// term alpha * (Z^k - Z^{k-1}) to every fresh Z iterate.
inline SolveReport alternating_nmd(const Matrix& x, const SparsityPattern& pattern,
                                   const Matrix& theta0, const SolverConfig& config,
                                   double alpha, const char* who) {
  check_problem(x, pattern, theta0, config, who);
  SolveReport report;
  RunClock clock(config);

  Matrix theta = theta0;
  Matrix z_prev = z_update(x, pattern, theta0);
  Matrix z_prev2 = z_prev;
  const double x_norm = x.norm();

  for (Index k = 1; k <= config.max_iter; ++k) {
    const Matrix z_proj = z_update(x, pattern, theta);
    Matrix z = alpha > 0.0 ? polyak_extrapolate(z_proj, z_prev - z_prev2, alpha) : z_proj;
    theta = tsvd(z, config.rank, config.tsvd).reconstruct();
    z_prev2 = std::move(z_prev);
    z_prev = std::move(z);

    const double objective = (x - relu(theta)).norm();
    const double rel = objective / x_norm;
    if (config.observer) {
      config.observer(IterateEvent{k, z_proj, z_prev, theta, theta, rel, objective, std::nullopt});
    }
    if (auto stop = clock.record(report, k, rel, (z_prev - theta).norm())) {
      report.termination = *stop;
      break;
    }
  }
  report.theta = std::move(theta);
  return report;
}

}  // namespace detail

/// Naive alternating scheme: Z-update then rank-r TSVD, repeated.
inline SolveReport naive_nmd(const Matrix& x, const SparsityPattern& pattern, const Matrix& theta0,
                             const SolverConfig& config) {
  return detail::alternating_nmd(x, pattern, theta0, config, 0.0, "naive_nmd");
}

/// Naive scheme with fixed Polyak momentum on Z (config.alpha_polyak).
inline SolveReport a_naive_nmd(const Matrix& x, const SparsityPattern& pattern, const Matrix& theta0,
                               const SolverConfig& config) {
  return detail::alternating_nmd(x, pattern, theta0, config, config.alpha_polyak, "a_naive_nmd");
}

}  // namespace relunmd
