#pragma once

#include <string>
#include <string_view>

#include "relunmd/init/init.hpp"
#include "relunmd/solvers/a_nmd.hpp"
#include "relunmd/solvers/naive.hpp"
#include "relunmd/solvers/three_block.hpp"

namespace relunmd {

enum class Algorithm { naive, a_naive, a_nmd, three_block, tsvd_baseline };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::naive: return "naive";
    case Algorithm::a_naive: return "a_naive";
    case Algorithm::a_nmd: return "a_nmd";
    case Algorithm::three_block: return "three_block";
    case Algorithm::tsvd_baseline: return "tsvd_baseline";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "naive") return Algorithm::naive;
  if (name == "a_naive") return Algorithm::a_naive;
  if (name == "a_nmd") return Algorithm::a_nmd;
  if (name == "three_block" || name == "3b_nmd") return Algorithm::three_block;
  if (name == "tsvd_baseline" || name == "tsvd") return Algorithm::tsvd_baseline;
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

/// max(0, X_r) with X_r the rank-r TSVD of x; zero iterations.
inline SolveReport tsvd_baseline(const Matrix& x, const SolverConfig& config) {
  config.validate();
  detail::RunClock clock(config);
  SolveReport report;
  report.theta = tsvd(x, config.rank, config.tsvd).reconstruct();
  const double rel = relative_error(x, report.theta);
  report.termination = clock.record(report, 0, rel, 0.0).value_or(Termination::max_iter);
  return report;
}

/// Runs one algorithm from theta0. three_block splits theta0 into balanced
/// factors first.
inline SolveReport run_algorithm(Algorithm algorithm, const Matrix& x, const SparsityPattern& pattern,
                                 const Matrix& theta0, const SolverConfig& config) {
  switch (algorithm) {
    case Algorithm::naive: return naive_nmd(x, pattern, theta0, config);
    case Algorithm::a_naive: return a_naive_nmd(x, pattern, theta0, config);
    case Algorithm::a_nmd: return a_nmd(x, pattern, theta0, config);
    case Algorithm::three_block: {
      const Factors f = split_factors(theta0, config.rank, config.tsvd);
      return three_block_nmd(x, pattern, f.w, f.h, config);
    }
    case Algorithm::tsvd_baseline: return tsvd_baseline(x, config);
  }
  throw ParameterError("run_algorithm: unknown algorithm");
}

}  // namespace relunmd
