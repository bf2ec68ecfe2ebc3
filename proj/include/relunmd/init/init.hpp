#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relunmd/core/matrix.hpp"
#include "relunmd/core/rng.hpp"
#include "relunmd/core/svd.hpp"
#include "relunmd/solvers/types.hpp"

namespace relunmd {

enum class InitStrategy { random_scaled, tsvd, nuclear_norm };

inline std::string_view to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::random_scaled: return "random_scaled";
    case InitStrategy::tsvd: return "tsvd";
    case InitStrategy::nuclear_norm: return "nuclear_norm";
  }
  return "unknown";
}

inline InitStrategy parse_init_strategy(std::string_view name) {
  if (name == "random_scaled" || name == "rand" || name == "random") return InitStrategy::random_scaled;
  if (name == "tsvd") return InitStrategy::tsvd;
  if (name == "nuclear_norm" || name == "nuclear") return InitStrategy::nuclear_norm;
  throw ParameterError("unknown init strategy '" + std::string(name) + "'");
}

struct InitConfig {
  InitStrategy strategy = InitStrategy::nuclear_norm;
  Index rank = 1;
  std::uint64_t seed = 1;
  int subgradient_iters = 3;
  double backtrack_shrink = 0.5;
  int backtrack_max = 20;
  TsvdOptions tsvd;

  void validate() const {
    if (rank < 1) throw ParameterError("init: rank must be >= 1");
    if (subgradient_iters < 1) throw ParameterError("init: subgradient_iters must be >= 1");
    if (!(backtrack_shrink > 0.0 && backtrack_shrink < 1.0))
      throw ParameterError("init: backtrack_shrink must lie in (0, 1)");
    if (backtrack_max < 0) throw ParameterError("init: backtrack_max must be >= 0");
  }
};

/// argmin_alpha ||x - alpha max(0, theta)||_F = <x, max(0,theta)> / ||max(0,theta)||_F^2.
inline double optimal_scale(const Matrix& x, const Matrix& theta) {
  const Matrix positive = relu(theta);
  const double denom = positive.squaredNorm();
  if (denom == 0.0) throw ParameterError("optimal_scale: max(0, theta) is zero");
  return frobenius_inner(x, positive) / denom;
}

/// Theta = alpha* W H with standard normal W (m x r), H (r x n) drawn from
/// the init stream of `seed`.
inline Matrix random_scaled_init(const Matrix& x, Index r, std::uint64_t seed) {
  require_nonempty(x, "random_scaled_init");
  if (r < 1 || r > std::min(x.rows(), x.cols()))
    throw ParameterError("random_scaled_init: rank outside [1, min(m, n)]");
  Rng rng(seed, Stream::init);
  const Matrix w = rng.normal_matrix(x.rows(), r);
  const Matrix h = rng.normal_matrix(r, x.cols());
  Matrix theta = w * h;
  double alpha = 1.0;
  try {
    alpha = optimal_scale(x, theta);
  } catch (const ParameterError&) {
    alpha = 1.0;
  }
  // alpha* = 0 only when max(0, theta) misses the support of x entirely.
  if (!(alpha > 0.0)) alpha = 1.0;
  return alpha * theta;
}

inline Matrix tsvd_init(const Matrix& x, Index r, const TsvdOptions& opts = {}) {
  return tsvd(x, r, opts).reconstruct();
}

/// Euclidean projection onto {theta : theta = x on I+, theta <= 0 on I0}.
inline Matrix project_feasible(const Matrix& theta, const Matrix& x, const SparsityPattern& pattern) {
  require_same_shape(theta, x, "project_feasible");
  if (pattern.rows() != x.rows() || pattern.cols() != x.cols())
    throw ShapeError("project_feasible: pattern shape mismatch");
  return pattern.positive().select(x, theta.cwiseMin(0.0));
}

/// Nuclear norm of the (feasible) iterate after each step, and the accepted
/// step size (0 when backtracking found no decrease).
struct NuclearInitTrace {
  std::vector<double> nuclear_norms;
  std::vector<double> steps;
};

namespace detail {

// U V^T over the numerical rank (sigma > 1e-10 sigma_1).
inline Matrix nuclear_subgradient(const Matrix& theta) {
  const TsvdResult svd = full_svd(theta);
  const Vector& s = svd.singular_values;
  if (s.size() == 0 || s(0) == 0.0) return Matrix::Zero(theta.rows(), theta.cols());
  Index k = 0;
  while (k < s.size() && s(k) > 1e-10 * s(0)) ++k;
  return svd.u.leftCols(k) * svd.v.leftCols(k).transpose();
}

}  // namespace detail

/**
 * Nuclear-norm initialization.
 *
 * Starts from random_scaled_init and takes `subgradient_iters` projected
 * subgradient steps Theta <- P(Theta - a U V^T) on
 *   min ||Theta||_*  s.t.  Theta = X on I+, Theta <= 0 on I0.
 * Each step starts at a = ||Theta||_F / ||U V^T||_F and shrinks by
 * `backtrack_shrink` until ||P(Theta - a U V^T)||_* < ||Theta||_*; if none is
 * found within `backtrack_max` shrinks the step is zero, i.e. Theta <- P(Theta).
 * The random start is infeasible with a small nuclear norm, so the first
 * step normally ends as the plain projection. Returns the rank-r TSVD of the
 * last iterate.
 *
 * subgradient_iters == 0 is accepted here (InitConfig::validate rejects it)
 * and returns the rank-r TSVD of the random start.
 */
inline Matrix nuclear_norm_init(const Matrix& x, const SparsityPattern& pattern, const InitConfig& config,
                                NuclearInitTrace* trace = nullptr) {
  Matrix theta = random_scaled_init(x, config.rank, config.seed);
  double current_norm = nuclear_norm(theta);
  for (int it = 0; it < config.subgradient_iters; ++it) {
    const Matrix y = detail::nuclear_subgradient(theta);
    const double y_norm = y.norm();
    double step = y_norm > 0.0 ? theta.norm() / y_norm : 0.0;
    bool moved = false;
    for (int b = 0; b <= config.backtrack_max && step > 0.0; ++b, step *= config.backtrack_shrink) {
      Matrix candidate = project_feasible(theta - step * y, x, pattern);
      const double candidate_norm = nuclear_norm(candidate);
      if (candidate_norm < current_norm) {
        theta = std::move(candidate);
        current_norm = candidate_norm;
        moved = true;
        break;
      }
    }
    if (!moved) {
      theta = project_feasible(theta, x, pattern);
      current_norm = nuclear_norm(theta);
    }
    if (trace) {
      trace->nuclear_norms.push_back(current_norm);
      trace->steps.push_back(moved ? step : 0.0);
    }
  }
  return tsvd(theta, config.rank, config.tsvd).reconstruct();
}

/// Theta0 for the configured strategy.
inline Matrix initialize(const Matrix& x, const SparsityPattern& pattern, const InitConfig& config) {
  switch (config.strategy) {
    case InitStrategy::random_scaled: return random_scaled_init(x, config.rank, config.seed);
    case InitStrategy::tsvd: return tsvd_init(x, config.rank, config.tsvd);
    case InitStrategy::nuclear_norm: return nuclear_norm_init(x, pattern, config);
  }
  throw ParameterError("initialize: unknown strategy");
}

struct Factors {
  Matrix w;  // m x r
  Matrix h;  // r x n
};

/// W = U_r, H = Sigma_r V_r^T from the rank-r TSVD of theta.
inline Factors split_factors(const Matrix& theta, Index r, const TsvdOptions& opts = {}) {
  const TsvdResult t = tsvd(theta, r, opts);
  return {t.u, t.singular_values.asDiagonal() * t.v.transpose()};
}

}  // namespace relunmd
