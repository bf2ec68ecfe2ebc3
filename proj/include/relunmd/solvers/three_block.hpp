#pragma once

#include <utility>

#include "relunmd/core/least_squares.hpp"
#include "relunmd/solvers/types.hpp"
#include "relunmd/solvers/updates.hpp"

namespace relunmd {

/**
 * Three-block NMD with Theta = W H and fixed momentum beta (config.beta_fixed).
 *
 * Per iteration: Z-update on I0, Nesterov push of Z, W from least squares
 * against H, then H against the new W, Theta = W H, Nesterov push of Theta.
 * No TSVD in the loop, so each step costs O(mnr).
 */
inline SolveReport three_block_nmd(const Matrix& x, const SparsityPattern& pattern, const Matrix& w0,
                                   const Matrix& h0, const SolverConfig& config) {
  if (w0.rows() != x.rows() || h0.cols() != x.cols() || w0.cols() != h0.rows())
    throw ShapeError("three_block_nmd: w0 (m x r) and h0 (r x n) do not match x");
  if (w0.cols() != config.rank)
    throw ParameterError("three_block_nmd: factor width differs from config.rank");
  Matrix theta = w0 * h0;
  detail::check_problem(x, pattern, theta, config, "three_block_nmd");
  SolveReport report;
  detail::RunClock clock(config);

  const double beta = config.beta_fixed;
  const double x_norm = x.norm();
  Matrix w = w0;
  Matrix h = h0;
  Matrix wh = theta;
  Matrix z = z_update(x, pattern, theta);

  for (Index k = 1; k <= config.max_iter; ++k) {
    const Matrix z_proj = z_update(x, pattern, theta);
    z = nesterov_extrapolate(z_proj, z, beta);

    LsSolution w_step = solve_ls_left(z, h);
    w = std::move(w_step.solution);
    LsSolution h_step = solve_ls_right(z, w);
    h = std::move(h_step.solution);
    report.rank_warnings += (w_step.rank_deficient ? 1 : 0) + (h_step.rank_deficient ? 1 : 0);

    wh = w * h;
    theta = nesterov_extrapolate(wh, theta, beta);

    const double objective = (x - relu(wh)).norm();
    const double rel = objective / x_norm;
    if (config.observer) {
      config.observer(IterateEvent{k, z_proj, z, theta, wh, rel, objective, std::nullopt, beta, beta});
    }
    if (auto stop = clock.record(report, k, rel, (z - theta).norm())) {
      report.termination = *stop;
      break;
    }
  }
  report.theta = std::move(wh);
  report.w = std::move(w);
  report.h = std::move(h);
  return report;
}

}  // namespace relunmd
