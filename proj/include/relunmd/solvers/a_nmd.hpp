#pragma once

#include <utility>

#include "relunmd/core/svd.hpp"
#include "relunmd/solvers/momentum.hpp"
#include "relunmd/solvers/types.hpp"
#include "relunmd/solvers/updates.hpp"

namespace relunmd {

/**
 * Aggressive-momentum NMD.
 *
 * Each iteration: Z-update on I0, Nesterov push of Z, rank-r TSVD, Nesterov
 * push of Theta. The step is kept only if ||X - max(0, Theta)||_F strictly
 * decreases; otherwise the iterates roll back and beta shrinks.
 *
 * The reported theta is the TSVD output of the latest accepted step (rank r);
 * the stored, extrapolated Theta can have rank up to 2r. The stopping test
 * uses the reported theta.
 */
inline SolveReport a_nmd(const Matrix& x, const SparsityPattern& pattern, const Matrix& theta0,
                         const SolverConfig& config) {
  detail::check_problem(x, pattern, theta0, config, "a_nmd");
  SolveReport report;
  detail::RunClock clock(config);

  MomentumState momentum = MomentumState::initial(config.beta0, config.momentum);
  Matrix z = z_update(x, pattern, theta0);
  Matrix theta = theta0;
  Matrix reported = theta0;
  double objective = (x - relu(theta)).norm();
  const double x_norm = x.norm();
  double reported_rel = relative_error(x, reported);
  Index consecutive_rejections = 0;

  for (Index k = 1; k <= config.max_iter; ++k) {
    const double beta = momentum.beta;
    const Matrix z_proj = z_update(x, pattern, theta);
    Matrix z_next = nesterov_extrapolate(z_proj, z, beta);
    Matrix theta_tsvd = tsvd(z_next, config.rank, config.tsvd).reconstruct();
    Matrix theta_next = nesterov_extrapolate(theta_tsvd, theta, beta);
    const double objective_next = (x - relu(theta_next)).norm();

    const bool accepted = objective_next < objective;
    const MomentumState updated = momentum_update(momentum, accepted);
    if (accepted) {
      z = std::move(z_next);
      theta = std::move(theta_next);
      reported = std::move(theta_tsvd);
      objective = objective_next;
      reported_rel = (x - relu(reported)).norm() / x_norm;
      consecutive_rejections = 0;
    } else {
      report.rejections.push_back({k, momentum.beta, updated.beta});
      ++consecutive_rejections;
    }
    momentum = updated;

    if (config.observer) {
      config.observer(IterateEvent{k, z_proj, z, theta, reported, reported_rel, objective, accepted,
                                   momentum.beta, momentum.beta_bar});
    }
    const bool stalled = consecutive_rejections >= config.max_consecutive_rejections;
    if (auto stop = clock.record(report, k, reported_rel, (z - theta).norm(), stalled)) {
      report.termination = *stop;
      break;
    }
  }
  report.theta = std::move(reported);
  return report;
}

}  // namespace relunmd
