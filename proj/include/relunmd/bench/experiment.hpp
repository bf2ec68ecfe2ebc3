#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "relunmd/bench/algorithms.hpp"
#include "relunmd/io/csv.hpp"
#include "relunmd/io/idx.hpp"
#include "relunmd/io/synthetic.hpp"

namespace relunmd {

// ---------------------------------------------------------------------------
// Experiment description

/// X = max(0, W H), regenerated for every repeat with seed_base + k.
struct SyntheticSource {
  Index m = 100;
  Index n = 100;
  Index r = 5;
};

/// Thresholded Gaussian product standing in for image data; regenerated per repeat.
struct SurrogateSource {
  Index m = 500;
  Index n = 784;
  Index latent_rank = 64;
  double zero_fraction = 0.75;
};

/// IDX image file; `rows` > 0 draws that many images without replacement.
struct IdxSource {
  std::string images;
  std::optional<std::string> labels;
  Index rows = 0;
  std::uint64_t seed = 1;
};

struct CsvSource {
  std::string path;
};

using DataSource = std::variant<SyntheticSource, SurrogateSource, IdxSource, CsvSource>;

/// wall: elapsed columns hold measured seconds. logical: they hold the
/// iteration count, which makes every output byte reproducible.
enum class ClockMode { wall, logical };

struct ExperimentSpec {
  DataSource data = SyntheticSource{};
  std::vector<Algorithm> algorithms;
  InitConfig init;
  SolverConfig solver;
  Index repeats = 1;
  std::uint64_t seed = 1;
  std::string outputs = "bench_out";
  ClockMode clock = ClockMode::wall;
  unsigned threads = 1;

  void validate() const {
    if (repeats < 1) throw ParameterError("experiment: repeats must be >= 1");
    if (algorithms.empty()) throw ParameterError("experiment: at least one algorithm is required");
    if (threads < 1) throw ParameterError("experiment: threads must be >= 1");
    solver.validate();
    init.validate();
    if (init.rank != solver.rank) throw ParameterError("experiment: init rank differs from solver rank");
  }
};

// ---------------------------------------------------------------------------
// Result rows. Column order is part of the output format.

struct SummaryRow {
  std::string algorithm;
  std::int64_t seed = 0;  // -1 marks the mean over seeds
  double iterations = 0.0;
  double elapsed = 0.0;
  double final_rel_error = 0.0;
  std::string termination;
};

struct TraceRow {
  std::string algorithm;
  std::int64_t seed = 0;
  Index iteration = 0;
  double elapsed = 0.0;
  double rel_error = 0.0;
  double err_t = 0.0;
};

struct ErrorRow {
  std::string algorithm;
  std::int64_t seed = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<SummaryRow> summary;
  std::vector<TraceRow> trace;
  std::vector<ErrorRow> errors;
};

inline constexpr const char* kSummaryHeader = "algorithm,seed,iterations,elapsed_s,final_rel_error,termination";
inline constexpr const char* kTraceHeader = "algorithm,seed,iteration,elapsed_s,rel_error,err_t";
inline constexpr const char* kErrorsHeader = "algorithm,seed,message";

/// err_t = rel_error - e_min, e_min the smallest rel_error over all rows.
inline std::vector<TraceRow> compute_err_traces(std::vector<TraceRow> rows) {
  if (rows.empty()) throw ParameterError("compute_err_traces: no trace rows");
  double e_min = rows.front().rel_error;
  for (const auto& row : rows) e_min = std::min(e_min, row.rel_error);
  for (auto& row : rows) row.err_t = row.rel_error - e_min;
  return rows;
}

// ---------------------------------------------------------------------------
// JSON config

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ParameterError("config: '" + where + "' must be a table");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ParameterError("config: unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

}  // namespace detail

/**
 * Builds an ExperimentSpec from a JSON document:
 *
 *   { "data": {"source": "synthetic", "m": 200, "n": 200, "r": 16},
 *     "algorithms": ["naive", "a_nmd"],
 *     "init": {"strategy": "nuclear_norm", "subgradient_iters": 3},
 *     "solver": {"rank": 16, "tol": 1e-4, "max_iter": 2000},
 *     "repeats": 5, "seed": 1, "outputs": "out", "clock": "wall", "threads": 1 }
 *
 * data.source is one of synthetic | surrogate | idx | csv. init.rank defaults
 * to solver.rank.
 */
inline ExperimentSpec parse_experiment_spec(const nlohmann::json& doc) {
  using detail::read_opt;
  ExperimentSpec spec;
  try {
    detail::check_keys(doc, {"data", "algorithms", "init", "solver", "repeats", "seed", "outputs", "clock", "threads"},
                       "top level");
    if (!doc.contains("data")) throw ParameterError("config: missing 'data'");
    const auto& data = doc.at("data");
    const std::string source = data.value("source", std::string("synthetic"));
    if (source == "synthetic") {
      detail::check_keys(data, {"source", "m", "n", "r"}, "data");
      SyntheticSource s;
      read_opt(data, "m", s.m);
      read_opt(data, "n", s.n);
      read_opt(data, "r", s.r);
      spec.data = s;
    } else if (source == "surrogate") {
      detail::check_keys(data, {"source", "m", "n", "latent_rank", "zero_fraction"}, "data");
      SurrogateSource s;
      read_opt(data, "m", s.m);
      read_opt(data, "n", s.n);
      read_opt(data, "latent_rank", s.latent_rank);
      read_opt(data, "zero_fraction", s.zero_fraction);
      spec.data = s;
    } else if (source == "idx") {
      detail::check_keys(data, {"source", "images", "labels", "rows", "seed"}, "data");
      IdxSource s;
      s.images = data.at("images").get<std::string>();
      if (data.contains("labels") && !data.at("labels").is_null()) s.labels = data.at("labels").get<std::string>();
      read_opt(data, "rows", s.rows);
      read_opt(data, "seed", s.seed);
      spec.data = s;
    } else if (source == "csv") {
      detail::check_keys(data, {"source", "path"}, "data");
      spec.data = CsvSource{data.at("path").get<std::string>()};
    } else {
      throw ParameterError("config: unknown data source '" + source + "'");
    }

    if (doc.contains("algorithms"))
      for (const auto& name : doc.at("algorithms")) spec.algorithms.push_back(parse_algorithm(name.get<std::string>()));

    if (doc.contains("solver")) {
      const auto& s = doc.at("solver");
      detail::check_keys(s,
                         {"rank", "tol", "max_iter", "time_limit", "beta0", "beta_fixed", "alpha_polyak",
                          "max_consecutive_rejections", "gamma_bar", "gamma", "eta"},
                         "solver");
      read_opt(s, "rank", spec.solver.rank);
      read_opt(s, "tol", spec.solver.tol);
      read_opt(s, "max_iter", spec.solver.max_iter);
      if (s.contains("time_limit") && !s.at("time_limit").is_null()) spec.solver.time_limit = s.at("time_limit").get<double>();
      read_opt(s, "beta0", spec.solver.beta0);
      read_opt(s, "beta_fixed", spec.solver.beta_fixed);
      read_opt(s, "alpha_polyak", spec.solver.alpha_polyak);
      read_opt(s, "max_consecutive_rejections", spec.solver.max_consecutive_rejections);
      read_opt(s, "gamma_bar", spec.solver.momentum.gamma_bar);
      read_opt(s, "gamma", spec.solver.momentum.gamma);
      read_opt(s, "eta", spec.solver.momentum.eta);
    }
    spec.init.rank = spec.solver.rank;
    if (doc.contains("init")) {
      const auto& s = doc.at("init");
      detail::check_keys(s, {"strategy", "rank", "subgradient_iters", "backtrack_shrink", "backtrack_max"}, "init");
      if (s.contains("strategy")) spec.init.strategy = parse_init_strategy(s.at("strategy").get<std::string>());
      read_opt(s, "rank", spec.init.rank);
      read_opt(s, "subgradient_iters", spec.init.subgradient_iters);
      read_opt(s, "backtrack_shrink", spec.init.backtrack_shrink);
      read_opt(s, "backtrack_max", spec.init.backtrack_max);
    }
    read_opt(doc, "repeats", spec.repeats);
    read_opt(doc, "seed", spec.seed);
    read_opt(doc, "outputs", spec.outputs);
    read_opt(doc, "threads", spec.threads);
    if (doc.contains("clock")) {
      const std::string clock = doc.at("clock").get<std::string>();
      if (clock == "wall") spec.clock = ClockMode::wall;
      else if (clock == "logical") spec.clock = ClockMode::logical;
      else throw ParameterError("config: clock must be 'wall' or 'logical'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config: " + path + ": " + e.what());
  }
  return parse_experiment_spec(doc);
}

// ---------------------------------------------------------------------------
// Runner

namespace detail {

/// Runs fn(0..count-1) on up to `threads` workers; fn must not throw.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

inline Matrix subsample_rows(const Matrix& a, Index rows, std::uint64_t seed) {
  if (rows <= 0 || rows >= a.rows()) return a;
  std::vector<Index> order(static_cast<std::size_t>(a.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed, Stream::subsample);
  for (std::size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);
  order.resize(static_cast<std::size_t>(rows));
  std::sort(order.begin(), order.end());
  Matrix out(rows, a.cols());
  for (Index i = 0; i < rows; ++i) out.row(i) = a.row(order[static_cast<std::size_t>(i)]);
  return out;
}

struct SeedContext {
  std::optional<Matrix> x;
  std::optional<SparsityPattern> pattern;
  Matrix theta0;
  std::string error;
};

struct CellResult {
  std::optional<SummaryRow> summary;
  std::vector<TraceRow> trace;
  std::optional<ErrorRow> error;
};

}  // namespace detail

/// Loads or generates the data matrix for repeat seed `seed`.
inline Matrix load_experiment_data(const DataSource& source, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) -> Matrix {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SyntheticSource>) {
          return generate_synthetic({s.m, s.n, s.r, seed}).x;
        } else if constexpr (std::is_same_v<S, SurrogateSource>) {
          return sparse_surrogate(s.m, s.n, s.latent_rank, s.zero_fraction, seed);
        } else if constexpr (std::is_same_v<S, IdxSource>) {
          return detail::subsample_rows(load_idx(s.images, s.labels).matrix, s.rows, s.seed);
        } else {
          return load_csv(s.path);
        }
      },
      source);
}

/**
 * Runs every (algorithm, repeat) cell. Repeat k uses seed + k for the data
 * (when generated) and for the init. Cells run on up to spec.threads workers;
 * the returned rows are ordered by algorithm, then seed, independent of the
 * schedule. Failures land in `errors` and the remaining cells still run.
 */
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto repeats = static_cast<std::size_t>(spec.repeats);
  const bool per_seed_data =
      std::holds_alternative<SyntheticSource>(spec.data) || std::holds_alternative<SurrogateSource>(spec.data);

  std::vector<detail::SeedContext> contexts(repeats);
  std::optional<Matrix> shared;
  std::string shared_error;
  if (!per_seed_data) {
    try {
      shared = load_experiment_data(spec.data, spec.seed);
    } catch (const std::exception& e) {
      shared_error = e.what();
    }
  }

  detail::parallel_for(repeats, spec.threads, [&](std::size_t k) {
    auto& ctx = contexts[k];
    const std::uint64_t seed = spec.seed + k;
    try {
      if (!shared_error.empty()) throw std::runtime_error(shared_error);
      ctx.x = per_seed_data ? load_experiment_data(spec.data, seed) : *shared;
      ctx.pattern.emplace(*ctx.x);
      InitConfig init = spec.init;
      init.seed = seed;
      if (std::find_if(spec.algorithms.begin(), spec.algorithms.end(),
                       [](Algorithm a) { return a != Algorithm::tsvd_baseline; }) != spec.algorithms.end())
        ctx.theta0 = initialize(*ctx.x, *ctx.pattern, init);
    } catch (const std::exception& e) {
      ctx.error = e.what();
    }
  });

  const std::size_t cell_count = spec.algorithms.size() * repeats;
  std::vector<detail::CellResult> cells(cell_count);
  detail::parallel_for(cell_count, spec.threads, [&](std::size_t c) {
    const Algorithm algorithm = spec.algorithms[c / repeats];
    const std::size_t k = c % repeats;
    const auto seed = static_cast<std::int64_t>(spec.seed + k);
    const std::string name(to_string(algorithm));
    auto& cell = cells[c];
    const auto& ctx = contexts[k];
    if (!ctx.error.empty()) {
      cell.error = ErrorRow{name, seed, ctx.error};
      return;
    }
    try {
      const SolveReport report = run_algorithm(algorithm, *ctx.x, *ctx.pattern, ctx.theta0, spec.solver);
      const bool logical = spec.clock == ClockMode::logical;
      for (const auto& p : report.trace)
        cell.trace.push_back({name, seed, p.iteration, logical ? static_cast<double>(p.iteration) : p.elapsed,
                              p.rel_error, 0.0});
      cell.summary = SummaryRow{name,
                                seed,
                                static_cast<double>(report.iterations),
                                logical ? static_cast<double>(report.iterations) : report.elapsed,
                                report.final_rel_error(),
                                std::string(to_string(report.termination))};
    } catch (const std::exception& e) {
      cell.error = ErrorRow{name, seed, e.what()};
    }
  });

  ExperimentResult result;
  for (auto& cell : cells) {
    if (cell.summary) result.summary.push_back(*cell.summary);
    result.trace.insert(result.trace.end(), cell.trace.begin(), cell.trace.end());
    if (cell.error) result.errors.push_back(*cell.error);
  }
  for (Algorithm algorithm : spec.algorithms) {
    const std::string name(to_string(algorithm));
    SummaryRow mean{name, -1, 0.0, 0.0, 0.0, "mean"};
    int count = 0;
    for (const auto& row : result.summary) {
      if (row.algorithm != name || row.seed < 0) continue;
      mean.iterations += row.iterations;
      mean.elapsed += row.elapsed;
      mean.final_rel_error += row.final_rel_error;
      ++count;
    }
    if (count == 0) continue;
    mean.iterations /= count;
    mean.elapsed /= count;
    mean.final_rel_error /= count;
    result.summary.push_back(mean);
  }
  if (!result.trace.empty()) result.trace = compute_err_traces(std::move(result.trace));
  return result;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& r : rows)
    out += detail::csv_field(r.algorithm) + "," + std::to_string(r.seed) + "," + format_double(r.iterations) + "," +
           format_double(r.elapsed) + "," + format_double(r.final_rel_error) + "," + r.termination + "\n";
  return out;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& r : rows)
    out += detail::csv_field(r.algorithm) + "," + std::to_string(r.seed) + "," + std::to_string(r.iteration) + "," +
           format_double(r.elapsed) + "," + format_double(r.rel_error) + "," + format_double(r.err_t) + "\n";
  return out;
}

inline std::string errors_csv(const std::vector<ErrorRow>& rows) {
  std::string out = std::string(kErrorsHeader) + "\n";
  for (const auto& r : rows)
    out += detail::csv_field(r.algorithm) + "," + std::to_string(r.seed) + "," + detail::csv_field(r.message) + "\n";
  return out;
}

/// Writes summary.csv, trace.csv and errors.csv into `directory`.
inline void write_experiment_outputs(const ExperimentResult& result, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(directory / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (directory / name).string());
    out << text;
  };
  write("summary.csv", summary_csv(result.summary));
  write("trace.csv", trace_csv(result.trace));
  write("errors.csv", errors_csv(result.errors));
}

}  // namespace relunmd
