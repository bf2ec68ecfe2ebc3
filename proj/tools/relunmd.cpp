// relunmd: command-line front end for the ReLU-NMD solvers and benchmarks.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relunmd/relunmd.hpp"

namespace {

using namespace relunmd;

struct SynthArgs {
  std::string kind = "synthetic";
  Index m = 100, n = 100, r = 5;
  double zero_fraction = 0.75;
  std::uint64_t seed = 1;
  std::string out;
};

struct SolveArgs {
  std::string algo = "a_nmd";
  Index rank = 0;
  std::string in;
  std::string init = "nuclear_norm";
  std::uint64_t seed = 1;
  double tol = 1e-4;
  Index max_iter = 1000;
  std::optional<double> time_limit;
  std::string out_theta, out_w, out_h, trace;
};

struct BenchArgs {
  std::string config;
  std::string out;
  unsigned threads = 0;
  Index repeats = 0;
  std::optional<std::uint64_t> seed;
  std::string clock;
};

struct InitCompareArgs {
  Index m = 500, n = 500, r = 8;
  Index seeds = 10;
  std::uint64_t seed = 1;
  std::string out;
};

struct CompressArgs {
  std::string basis, data;
  Index rank = 20;
  std::string algo = "a_nmd";
  std::string init = "nuclear_norm";
  std::uint64_t seed = 1;
  double time_limit = 20.0;
  Index max_iter = 100000;
  std::string out;
};

SolverConfig solver_config(Index rank, double tol, Index max_iter, std::optional<double> time_limit) {
  SolverConfig cfg;
  cfg.rank = rank;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.time_limit = time_limit;
  return cfg;
}

int run_synth(const SynthArgs& a) {
  Matrix x;
  if (a.kind == "synthetic") x = generate_synthetic({a.m, a.n, a.r, a.seed}).x;
  else if (a.kind == "dictionary") x = sparse_dictionary(a.m, a.n, a.zero_fraction, a.seed);
  else if (a.kind == "surrogate") x = sparse_surrogate(a.m, a.n, a.r, a.zero_fraction, a.seed);
  else throw ParameterError("--kind must be synthetic, dictionary or surrogate");
  save_csv(x, a.out);
  std::cout << "wrote " << x.rows() << "x" << x.cols() << " matrix to " << a.out
            << " (zero fraction " << zero_fraction(x) << ")\n";
  return 0;
}

int run_solve(const SolveArgs& a) {
  const Matrix x = load_csv(a.in);
  const SparsityPattern pattern(x);
  const Algorithm algorithm = parse_algorithm(a.algo);
  SolverConfig cfg = solver_config(a.rank, a.tol, a.max_iter, a.time_limit);
  cfg.validate();

  Matrix theta0;
  if (algorithm != Algorithm::tsvd_baseline) {
    InitConfig init;
    init.strategy = parse_init_strategy(a.init);
    init.rank = a.rank;
    init.seed = a.seed;
    init.validate();
    theta0 = initialize(x, pattern, init);
  }
  const SolveReport report = run_algorithm(algorithm, x, pattern, theta0, cfg);

  std::cout << "algorithm " << to_string(algorithm) << "\n"
            << "iterations " << report.iterations << "\n"
            << "elapsed_s " << report.elapsed << "\n"
            << "rel_error " << format_double(report.final_rel_error()) << "\n"
            << "termination " << to_string(report.termination) << "\n";

  if (!a.out_theta.empty()) save_csv(report.theta, a.out_theta);
  if (!a.out_w.empty() || !a.out_h.empty()) {
    const Factors f = report.w ? Factors{*report.w, *report.h} : split_factors(report.theta, a.rank);
    if (!a.out_w.empty()) save_csv(f.w, a.out_w);
    if (!a.out_h.empty()) save_csv(f.h, a.out_h);
  }
  if (!a.trace.empty()) {
    std::vector<TraceRow> rows;
    for (const auto& p : report.trace)
      rows.push_back({std::string(to_string(algorithm)), static_cast<std::int64_t>(a.seed), p.iteration, p.elapsed,
                      p.rel_error, 0.0});
    std::ofstream out(a.trace, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.trace);
    out << trace_csv(compute_err_traces(rows));
  }
  return 0;
}

int run_bench(const BenchArgs& a) {
  ExperimentSpec spec = load_experiment_spec(a.config);
  if (const char* env = std::getenv("RELUNMD_OUTPUT_DIR"); env && *env) spec.outputs = env;
  if (!a.out.empty()) spec.outputs = a.out;
  if (a.threads > 0) spec.threads = a.threads;
  if (a.repeats > 0) spec.repeats = a.repeats;
  if (a.seed) spec.seed = *a.seed;
  if (a.clock == "wall") spec.clock = ClockMode::wall;
  else if (a.clock == "logical") spec.clock = ClockMode::logical;
  else if (!a.clock.empty()) throw ParameterError("--clock must be wall or logical");

  const ExperimentResult result = run_experiment(spec);
  write_experiment_outputs(result, spec.outputs);
  std::cout << summary_csv(result.summary);
  if (!result.errors.empty()) std::cerr << result.errors.size() << " cell(s) failed, see errors.csv\n";
  std::cout << "outputs in " << spec.outputs << "\n";
  return 0;
}

int run_init_compare(const InitCompareArgs& a) {
  if (a.seeds < 1) throw ParameterError("--seeds must be >= 1");
  const InitStrategy strategies[] = {InitStrategy::random_scaled, InitStrategy::tsvd, InitStrategy::nuclear_norm};
  std::string per_seed = "strategy,seed,rel_error\n";
  double sums[3] = {0.0, 0.0, 0.0};
  for (Index k = 0; k < a.seeds; ++k) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
    const Matrix x = generate_synthetic({a.m, a.n, a.r, seed}).x;
    const SparsityPattern pattern(x);
    for (int s = 0; s < 3; ++s) {
      InitConfig init;
      init.strategy = strategies[s];
      init.rank = a.r;
      init.seed = seed;
      init.validate();
      const double err = relative_error(x, initialize(x, pattern, init));
      sums[s] += err;
      per_seed += std::string(to_string(strategies[s])) + "," + std::to_string(seed) + "," + format_double(err) + "\n";
    }
  }
  std::string table = "strategy,mean_rel_error\n";
  for (int s = 0; s < 3; ++s)
    table += std::string(to_string(strategies[s])) + "," + format_double(sums[s] / static_cast<double>(a.seeds)) + "\n";
  std::cout << table;
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    out << per_seed;
  }
  return 0;
}

int run_nmf_compress(const CompressArgs& a) {
  const Matrix u = load_csv(a.basis);
  const Matrix x = load_csv(a.data);
  if (x.rows() != u.rows()) throw ShapeError("basis and data row counts differ");
  const SparsityPattern pattern(u);
  const Algorithm algorithm = parse_algorithm(a.algo);
  SolverConfig cfg = solver_config(a.rank, 1e-4, a.max_iter, a.time_limit);
  cfg.validate();

  Matrix theta0;
  if (algorithm != Algorithm::tsvd_baseline) {
    InitConfig init;
    init.strategy = parse_init_strategy(a.init);
    init.rank = a.rank;
    init.seed = a.seed;
    init.validate();
    theta0 = initialize(u, pattern, init);
  }
  const SolveReport report = run_algorithm(algorithm, u, pattern, theta0, cfg);
  const Matrix u_tsvd = tsvd_init(u, a.rank);

  const CompressionError e_solver = nmf_compression_error(x, report.theta);
  const CompressionError e_tsvd = nmf_compression_error(x, u_tsvd);
  std::cout << "method,basis_rel_error,e_nmf,nnls_converged\n"
            << to_string(algorithm) << "," << format_double(report.final_rel_error()) << ","
            << format_double(e_solver.value) << "," << (e_solver.converged ? "true" : "false") << "\n"
            << "tsvd," << format_double(relative_error(u, u_tsvd)) << "," << format_double(e_tsvd.value) << ","
            << (e_tsvd.converged ? "true" : "false") << "\n";
  if (!a.out.empty()) save_csv(relu(report.theta), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReLU nonlinear matrix decomposition: solvers, initializations and benchmarks"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a generated test matrix to CSV");
  synth_cmd->add_option("--kind", synth.kind, "synthetic | dictionary | surrogate")->capture_default_str();
  synth_cmd->add_option("--m", synth.m, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "Columns")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--r", synth.r, "Generative rank")->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--zero-fraction", synth.zero_fraction, "Target zero fraction (dictionary, surrogate)")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one algorithm on a CSV matrix");
  solve_cmd->add_option("--algo", solve.algo, "naive | a_naive | a_nmd | three_block | tsvd")->capture_default_str();
  solve_cmd->add_option("--rank", solve.rank, "Target rank r")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_option("--in", solve.in, "Input CSV")->required();
  solve_cmd->add_option("--init", solve.init, "random_scaled | tsvd | nuclear_norm")->capture_default_str();
  solve_cmd->add_option("--seed", solve.seed, "Init seed")->capture_default_str();
  solve_cmd->add_option("--tol", solve.tol, "Relative error target")->check(CLI::PositiveNumber)->capture_default_str();
  solve_cmd->add_option("--max-iter", solve.max_iter)->check(CLI::NonNegativeNumber)->capture_default_str();
  solve_cmd->add_option("--time-limit", solve.time_limit, "Seconds")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out-theta", solve.out_theta, "Write Theta as CSV");
  solve_cmd->add_option("--out-w", solve.out_w, "Write W as CSV");
  solve_cmd->add_option("--out-h", solve.out_h, "Write H as CSV");
  solve_cmd->add_option("--trace", solve.trace, "Write the error trace as CSV");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment described by a JSON config");
  bench_cmd->add_option("config", bench.config, "Config file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out, "Output directory (overrides RELUNMD_OUTPUT_DIR and the config)");
  bench_cmd->add_option("--threads", bench.threads, "Cap on parallel cells")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeats", bench.repeats)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Seed base");
  bench_cmd->add_option("--clock", bench.clock, "wall | logical");

  InitCompareArgs compare;
  auto* compare_cmd = app.add_subcommand("init-compare", "Compare the three initializations on synthetic data");
  compare_cmd->add_option("--m", compare.m)->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--n", compare.n)->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--r", compare.r, "Rank of data and init")->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--seeds", compare.seeds, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--seed", compare.seed, "First seed")->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Per-seed CSV");

  CompressArgs compress;
  auto* compress_cmd = app.add_subcommand("nmf-compress", "Compress an NMF basis and report e_NMF");
  compress_cmd->add_option("--basis", compress.basis, "Basis U (d x k) CSV")->required();
  compress_cmd->add_option("--data", compress.data, "Data X (d x N) CSV")->required();
  compress_cmd->add_option("--rank", compress.rank)->check(CLI::PositiveNumber)->capture_default_str();
  compress_cmd->add_option("--algo", compress.algo)->capture_default_str();
  compress_cmd->add_option("--init", compress.init)->capture_default_str();
  compress_cmd->add_option("--seed", compress.seed)->capture_default_str();
  compress_cmd->add_option("--time-limit", compress.time_limit, "Seconds")->check(CLI::PositiveNumber)->capture_default_str();
  compress_cmd->add_option("--max-iter", compress.max_iter)->check(CLI::NonNegativeNumber)->capture_default_str();
  compress_cmd->add_option("--out", compress.out, "Write max(0, Theta) as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*solve_cmd) return run_solve(solve);
    if (*bench_cmd) return run_bench(bench);
    if (*compare_cmd) return run_init_compare(compare);
    if (*compress_cmd) return run_nmf_compress(compress);
  } catch (const ParameterError& e) {
    std::cerr << "relunmd: parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "relunmd: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
