#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relunmd/core/matrix.hpp"
#include "relunmd/core/svd.hpp"

namespace relunmd {

/// Partition of the entries of X into I+ (X_ij > 0) and I0 (X_ij == 0).
class SparsityPattern {
 public:
  using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

  explicit SparsityPattern(const Matrix& x) : positive_(x.array() > 0.0) {
    if ((x.array() < 0.0).any()) throw ParameterError("SparsityPattern: x has negative entries");
    positive_count_ = positive_.count();
  }

  const Mask& positive() const { return positive_; }
  bool is_positive(Index i, Index j) const { return positive_(i, j); }
  Index rows() const { return positive_.rows(); }
  Index cols() const { return positive_.cols(); }
  Index positive_count() const { return positive_count_; }
  Index zero_count() const { return positive_.size() - positive_count_; }

 private:
  Mask positive_;
  Index positive_count_ = 0;
};

enum class Termination { tolerance_met, max_iter, time_limit, stalled };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::tolerance_met: return "tolerance_met";
    case Termination::max_iter: return "max_iter";
    case Termination::time_limit: return "time_limit";
    case Termination::stalled: return "stalled";
  }
  return "unknown";
}

struct TracePoint {
  Index iteration = 0;
  double elapsed = 0.0;
  double rel_error = 0.0;
  /// ||Z - Theta||_F of the stored iterates.
  double latent_residual = 0.0;
};

struct RejectionRecord {
  Index iteration = 0;
  double beta_before = 0.0;
  double beta_after = 0.0;
};

/// Per-iteration view handed to SolverConfig::observer. References are only
/// valid during the callback.
struct IterateEvent {
  Index iteration;
  const Matrix& z_projected;  // after the Z-update, before extrapolation
  const Matrix& z;            // stored Z iterate
  const Matrix& theta;        // stored Theta iterate (possibly extrapolated)
  const Matrix& theta_reported;  // rank-r certified iterate
  double rel_error;              // of theta_reported
  double objective;              // ||X - max(0, theta)||_F of the stored iterate
  std::optional<bool> accepted;  // A-NMD only
  double beta = 0.0;
  double beta_bar = 0.0;
};

using IterateObserver = std::function<void(const IterateEvent&)>;

/// Adaptive momentum hyperparameters, 1 < gamma_bar < gamma < eta.
struct MomentumParams {
  double gamma_bar = 1.05;
  double gamma = 1.1;
  double eta = 2.5;

  void validate() const {
    if (!(1.0 < gamma_bar && gamma_bar < gamma && gamma < eta)) {
      throw ParameterError("momentum: require 1 < gamma_bar < gamma < eta");
    }
  }
};

struct SolverConfig {
  Index rank = 1;
  double tol = 1e-4;
  Index max_iter = 1000;
  std::optional<double> time_limit;  // seconds
  double beta0 = 0.7;         // A-NMD initial momentum
  double beta_fixed = 0.7;    // 3B-NMD
  double alpha_polyak = 0.7;  // A-Naive
  Index max_consecutive_rejections = 50;
  MomentumParams momentum;
  TsvdOptions tsvd;
  IterateObserver observer;

  void validate() const {
    if (rank < 1) throw ParameterError("rank must be >= 1");
    if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
    if (max_iter < 0) throw ParameterError("max_iter must be >= 0");
    if (time_limit && !(*time_limit > 0.0)) throw ParameterError("time_limit must be > 0");
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw ParameterError("beta0 must lie in (0, 1)");
    // Zero momentum is allowed here: it degenerates to the unaccelerated scheme.
    if (!(beta_fixed >= 0.0 && beta_fixed < 1.0)) throw ParameterError("beta_fixed must lie in [0, 1)");
    if (!(alpha_polyak >= 0.0 && alpha_polyak < 1.0)) throw ParameterError("alpha_polyak must lie in [0, 1)");
    if (max_consecutive_rejections < 1) throw ParameterError("max_consecutive_rejections must be >= 1");
    momentum.validate();
  }
};

struct SolveReport {
  Matrix theta;              // final rank-r Theta
  std::optional<Matrix> w;   // 3B-NMD factors, theta = w * h
  std::optional<Matrix> h;
  Index iterations = 0;
  double elapsed = 0.0;
  std::vector<TracePoint> trace;
  Termination termination = Termination::max_iter;
  std::vector<RejectionRecord> rejections;  // A-NMD only
  Index rank_warnings = 0;                  // 3B-NMD least-squares rank deficiency count

  double final_rel_error() const { return trace.empty() ? 1.0 : trace.back().rel_error; }
};

namespace detail {

inline void check_problem(const Matrix& x, const SparsityPattern& pattern, const Matrix& theta0,
                          const SolverConfig& config, const char* who) {
  config.validate();
  require_nonempty(x, who);
  require_finite(x, who);
  require_finite(theta0, who);
  require_same_shape(x, theta0, who);
  if (pattern.rows() != x.rows() || pattern.cols() != x.cols())
    throw ShapeError(std::string(who) + ": pattern shape mismatch");
  if (config.rank > std::min(x.rows(), x.cols()))
    throw ParameterError(std::string(who) + ": rank exceeds min(m, n)");
  if (x.norm() == 0.0) throw ParameterError(std::string(who) + ": x is zero");
}

/// Wall clock plus the stopping rules shared by every solver.
class RunClock {
 public:
  using clock = std::chrono::steady_clock;

  explicit RunClock(const SolverConfig& config) : config_(config), start_(clock::now()) {}

  double elapsed() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

  /// Appends a trace point; returns a termination if the run should stop.
  std::optional<Termination> record(SolveReport& report, Index iteration, double rel_error,
                                    double latent_residual, bool stalled = false) const {
    const double t = elapsed();
    report.trace.push_back({iteration, t, rel_error, latent_residual});
    report.iterations = iteration;
    report.elapsed = t;
    if (rel_error <= config_.tol) return Termination::tolerance_met;
    if (stalled) return Termination::stalled;
    if (config_.time_limit && t >= *config_.time_limit) return Termination::time_limit;
    return std::nullopt;
  }

 private:
  const SolverConfig& config_;
  clock::time_point start_;
};

}  // namespace detail
}  // namespace relunmd
