#pragma once

#include <algorithm>

#include "relunmd/core/errors.hpp"
#include "relunmd/solvers/types.hpp"

namespace relunmd {

/**
 * Adaptive extrapolation parameter of A-NMD.
 *
 * beta grows by gamma after every accepted step, capped by beta_bar; beta_bar
 * itself grows by gamma_bar up to 1. On a rejected step beta is divided by
 * eta and beta_bar falls back to the beta of the latest accepted step.
 * Invariant: 0 < beta <= beta_bar <= 1.
 */
struct MomentumState {
  double beta = 0.7;
  double beta_bar = 1.0;
  double beta_last_accepted = 0.7;
  MomentumParams params;

  static MomentumState initial(double beta0, const MomentumParams& params = {}) {
    params.validate();
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw ParameterError("momentum: beta0 must lie in (0, 1)");
    return {beta0, 1.0, beta0, params};
  }
};

inline MomentumState momentum_update(const MomentumState& state, bool error_decreased) {
  MomentumState next = state;
  if (error_decreased) {
    next.beta = std::min(state.beta_bar, state.params.gamma * state.beta);
    next.beta_bar = std::min(1.0, state.params.gamma_bar * state.beta_bar);
    next.beta_last_accepted = state.beta;
  } else {
    next.beta = state.beta / state.params.eta;
    next.beta_bar = state.beta_last_accepted;
  }
  return next;
}

}  // namespace relunmd
