#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <shiftkrylov/shifted_solvers.hpp>

#include "cli_common.hpp"

namespace shiftkrylov::cli {

enum class Format { Csv, Markdown };
Format parse_format(const std::string& text);

struct GenOptions {
  GeneratorSpec spec;
  std::string output;
  /// Companion initial-condition vector, written when non-empty.
  std::string u0_output;
};

int cmd_gen(const GenOptions& opt, std::ostream& out);

struct SolveOptions {
  std::string matrix;
  std::string shifts = "list:0";
  std::string solver = "shessen";
  std::size_t m = 30;
  double tol = 1e-8;
  std::int64_t max_mvps = 4000;
  std::string rhs = "ones";
  std::optional<std::size_t> seed_shift;
  Format format = Format::Markdown;
  std::string output;
  std::string solution_output;
};

/// One solver run on one family; the shifts listed are the caller's, not
/// the seed-translated ones.
struct SolverRun {
  SolveReport report;
  std::vector<std::vector<cplx>> solutions;
};

/// Dispatches `shessen`, `sfom` or `hessen` (one restarted Hessenberg solve
/// per shift). Applies the seed shift when given.
SolverRun run_solver(const std::string& solver, const AnyCsrMatrix& A, const VectorData& b,
                     const std::vector<cplx>& shifts, const SolverConfig& cfg,
                     std::optional<std::size_t> seed_shift);

int cmd_solve(const SolveOptions& opt, std::ostream& out);

struct BenchProblem {
  std::string name;
  std::string matrix;
  std::optional<GeneratorSpec> generator;
  std::string shifts = "arithmetic:1e-3:8";
  std::string rhs = "ones";
  std::size_t m = 30;
  double tol = 1e-8;
  std::int64_t max_mvps = 4000;
  std::optional<std::size_t> seed_shift;
};

struct BenchConfig {
  std::vector<std::string> solvers;
  std::size_t reps = 1;
  Format format = Format::Csv;
  std::vector<BenchProblem> problems;
};

/// `key = value` lines; `[problem NAME]` starts a problem section whose keys
/// override the global ones seen so far. Throws ConfigError.
BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::string& path);

struct BenchRow {
  std::string problem;
  std::string solver;
  std::size_t m = 0;
  std::size_t nu = 0;
  std::size_t cycles = 0;
  std::int64_t mvps = 0;
  double time_ms = 0.0;
  std::int64_t predicted_flops = 0;
  std::size_t converged = 0;
  std::string dagger_flags;
};

std::vector<BenchRow> run_bench(const BenchConfig& cfg, bool parallel);
void write_bench(std::ostream& out, const std::vector<BenchRow>& rows, const BenchConfig& cfg);
int cmd_bench(const std::string& config_path, bool parallel, std::optional<Format> format,
              const std::string& output, std::ostream& out);

struct MatfuncOptions {
  std::string matrix;
  std::string rule;
  std::string u0 = "ones";
  bool dense_oracle = false;
  std::size_t m = 30;
  double tol = 1e-10;
  std::int64_t max_mvps = 4000;
  std::string output;
};

int cmd_matfunc(const MatfuncOptions& opt, std::ostream& out);

}  // namespace shiftkrylov::cli
