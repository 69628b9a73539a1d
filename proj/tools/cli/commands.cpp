#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>
#include <shiftkrylov/cost_model.hpp>
#include <shiftkrylov/error.hpp>
#include <shiftkrylov/matfunc.hpp>
#include <shiftkrylov/matrix_market.hpp>

namespace shiftkrylov::cli {

namespace {

const char* const dagger = "‡";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool all_real(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) { return z.imag() == 0.0; });
}

template <Scalar T>
std::vector<T> narrow(const std::vector<cplx>& v) {
  if constexpr (is_complex_v<T>) {
    return v;
  } else {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
  }
}

void check_solver(const std::string& s) {
  if (s != "shessen" && s != "sfom" && s != "hessen")
    throw ConfigError("unknown solver '" + s + "' (use shessen, sfom or hessen)");
}

// Restarted Hessenberg on every A - sigma_i I in turn, merged into one report.
template <Scalar T>
SolverRun run_hessen_each(const CsrMatrix<T>& A, const std::vector<T>& b, const std::vector<cplx>& shifts,
                          const SolverConfig& cfg) {
  SolverRun run;
  auto& rep = run.report;
  rep.solver = "hessen";
  rep.process = ProcessKind::Hessenberg;
  rep.restart = std::min<std::size_t>(cfg.restart, static_cast<std::size_t>(A.rows()));
  std::int64_t nz = 0;
  auto absorb = [&](const SolveReport& r, std::vector<cplx> x) {
    rep.cycles += r.cycles;
    rep.basis_mvps += r.basis_mvps;
    rep.confirmation_mvps += r.confirmation_mvps;
    rep.setup_mvps += r.setup_mvps;
    rep.mvps += r.mvps;
    rep.wall_ms += r.wall_ms;
    rep.breakdown = rep.breakdown || r.breakdown;
    rep.shifts.push_back(r.shifts[0]);
    run.solutions.push_back(std::move(x));
  };
  for (const cplx sigma : shifts) {
    if (!is_complex_v<T> && sigma.imag() == 0.0) {
      if constexpr (!is_complex_v<T>) {
        const auto M = shift_diagonal(A, sigma.real());
        nz = M.nnz();
        auto r = solve_hessen(M, std::span<const double>(b), std::span<const double>{}, cfg);
        absorb(r.report, std::vector<cplx>(r.x.begin(), r.x.end()));
      }
    } else {
      const CsrMatrix<cplx> M = shift_diagonal(A, sigma);
      nz = M.nnz();
      const std::vector<cplx> bc(b.begin(), b.end());
      auto r = solve_hessen(M, std::span<const cplx>(bc), std::span<const cplx>{}, cfg);
      absorb(r.report, std::move(r.x));
    }
    rep.shifts.back().shift = sigma;
  }
  // Each system is its own family of one; the Table 1 count per cycle is the
  // same for all of them.
  SolveReport single = rep;
  single.shifts.resize(1);
  rep.cost = attach_costs(single, CostProcess::Hessenberg, A.rows(), nz).cost;
  return run;
}

template <Scalar T>
SolverRun run_typed(const std::string& solver, const CsrMatrix<T>& A, const std::vector<T>& b,
                    const std::vector<cplx>& shifts, const SolverConfig& cfg, std::optional<std::size_t> seed) {
  check_solver(solver);
  const CsrMatrix<T>* op = &A;
  std::vector<cplx> solve_shifts = shifts;
  std::optional<SeededFamily<T>> seeded;
  if (seed) {
    seeded = absorb_seed_shift(A, std::span<const cplx>(shifts), *seed);
    op = &seeded->matrix;
    solve_shifts = seeded->shifts;
  }
  SolverRun run;
  if (solver == "hessen") {
    run = run_hessen_each(*op, b, solve_shifts, cfg);
  } else {
    auto res = solver == "shessen" ? solve_shifted_hessen(*op, std::span<const T>(b), std::span<const cplx>(solve_shifts), cfg)
                                   : solve_shifted_fom(*op, std::span<const T>(b), std::span<const cplx>(solve_shifts), cfg);
    run.report = attach_costs(std::move(res.report),
                              solver == "shessen" ? CostProcess::Hessenberg : CostProcess::Arnoldi, op->rows(),
                              op->nnz());
    run.solutions = std::move(res.solutions);
  }
  for (std::size_t i = 0; i < shifts.size(); ++i) run.report.shifts[i].shift = shifts[i];
  return run;
}

AnyCsrMatrix load_operator(const std::string& path) { return load_matrix_market(path); }

index_t order(const AnyCsrMatrix& A) {
  return std::visit([](const auto& M) { return M.rows(); }, A);
}

std::string flags(const ShiftOutcome& s) {
  std::string f;
  auto add = [&](const std::string& t) { f += (f.empty() ? "" : " ") + t; };
  if (!s.converged) add(dagger);
  if (s.desynchronized) add("desync");
  if (s.stagnated) add("stagnated");
  if (s.skipped_cycles > 0) add("skipped=" + std::to_string(s.skipped_cycles));
  return f;
}

std::string sci(double v) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(3) << v;
  return o.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void write_solve(std::ostream& out, const SolveReport& rep, Format format) {
  const double est_nan = std::numeric_limits<double>::quiet_NaN();
  auto last_estimate = [&](const ShiftOutcome& s) { return s.estimates.empty() ? est_nan : s.estimates.back(); };
  const std::int64_t flops = rep.cost ? rep.cost->total : 0;
  if (format == Format::Csv) {
    out << "# solver=" << rep.solver << " m=" << rep.restart << " nu=" << rep.shifts.size() << " cycles=" << rep.cycles
        << " mvps=" << rep.mvps << " basis_mvps=" << rep.basis_mvps << " confirmation_mvps=" << rep.confirmation_mvps
        << " recovery_mvps=" << rep.recovery_mvps << " time_ms=" << fixed(rep.wall_ms, 3)
        << " predicted_flops=" << flops << '\n';
    out << "shift_re,shift_im,converged,cycles,estimate,true_residual,flags\n";
    for (const auto& s : rep.shifts)
      out << std::setprecision(17) << s.shift.real() << ',' << s.shift.imag() << ',' << (s.converged ? 1 : 0) << ','
          << s.cycles << ',' << sci(last_estimate(s)) << ',' << sci(s.true_residual) << ',' << flags(s) << '\n';
    return;
  }
  out << "solver: " << rep.solver << ", m = " << rep.restart << ", nu = " << rep.shifts.size()
      << ", cycles = " << rep.cycles << ", MVPs = " << rep.mvps << " (basis " << rep.basis_mvps << ", confirmation "
      << rep.confirmation_mvps << ", recovery " << rep.recovery_mvps << "), time = " << fixed(rep.wall_ms, 3)
      << " ms, predicted flops = " << flops << "\n\n";
  out << "| shift | converged | cycles | estimate | true residual | flags |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& s : rep.shifts)
    out << "| " << format_complex(s.shift) << " | " << (s.converged ? "yes" : dagger) << " | " << s.cycles << " | "
        << sci(last_estimate(s)) << " | " << sci(s.true_residual) << " | " << flags(s) << " |\n";
  if (!rep.all_converged()) out << '\n' << dagger << " not converged within the MVP budget\n";
}

template <class F>
auto dispatch(const AnyCsrMatrix& A, const VectorData& v, bool force_complex, F&& f) {
  if (const auto* Ar = std::get_if<CsrMatrix<double>>(&A); Ar && v.real && !force_complex)
    return f(*Ar, narrow<double>(v.values));
  if (const auto* Ar = std::get_if<CsrMatrix<double>>(&A)) return f(complexify(*Ar), v.values);
  return f(std::get<CsrMatrix<cplx>>(A), v.values);
}

std::string concat_flags(const SolveReport& rep) {
  std::string f;
  for (const auto& s : rep.shifts) f += s.converged ? "." : dagger;
  return f;
}

void apply_problem_key(BenchProblem& p, const std::string& key, const std::string& value, const std::string& where) {
  auto parse_size = [&](const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || x < 0) throw ConfigError(where + ": '" + v + "' is not a nonnegative integer");
    return x;
  };
  if (key == "matrix") {
    p.matrix = value;
  } else if (key == "generator") {
    p.generator = parse_generator(value);
  } else if (key == "shifts") {
    parse_shifts(value);
    p.shifts = value;
  } else if (key == "rhs") {
    p.rhs = value;
  } else if (key == "m") {
    p.m = static_cast<std::size_t>(parse_size(value));
  } else if (key == "tol") {
    try {
      p.tol = std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad tol '" + value + "'");
    }
  } else if (key == "max_mvps") {
    p.max_mvps = parse_size(value);
  } else if (key == "seed_shift") {
    p.seed_shift = static_cast<std::size_t>(parse_size(value));
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::vector<BenchRow> run_problem(const BenchProblem& p, const BenchConfig& cfg) {
  AnyCsrMatrix A = p.generator ? AnyCsrMatrix(build(*p.generator)) : load_operator(p.matrix);
  const VectorData b = make_vector(p.rhs, order(A));
  const auto shifts = parse_shifts(p.shifts);
  SolverConfig sc;
  sc.restart = p.m;
  sc.tol = p.tol;
  sc.max_mvps = p.max_mvps;
  std::vector<BenchRow> rows;
  for (const auto& solver : cfg.solvers) {
    std::vector<double> times;
    SolverRun run;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      run = run_solver(solver, A, b, shifts, sc, p.seed_shift);
      times.push_back(run.report.wall_ms);
    }
    BenchRow row;
    row.problem = p.name;
    row.solver = solver;
    row.m = run.report.restart;
    row.nu = run.report.shifts.size();
    row.cycles = run.report.cycles;
    row.mvps = run.report.mvps;
    row.time_ms = median(times);
    row.predicted_flops = run.report.cost ? run.report.cost->total : 0;
    row.converged = run.report.converged_count();
    row.dagger_flags = concat_flags(run.report);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "markdown" || text == "md") return Format::Markdown;
  throw ConfigError("unknown format '" + text + "' (use csv or markdown)");
}

int cmd_gen(const GenOptions& opt, std::ostream& out) {
  const auto A = build(opt.spec);
  save_matrix_market(opt.output, A);
  const double h = 1.0 / static_cast<double>(opt.spec.n + 1);
  nlohmann::json meta = {{"generator", opt.spec.kind},
                         {"grid_points_per_axis", opt.spec.n},
                         {"h", h},
                         {"dimension", A.rows()},
                         {"nnz", A.nnz()},
                         {"ordering", "lexicographic, x fastest"},
                         {"boundary", "homogeneous Dirichlet"}};
  if (opt.spec.kind == "convdiff3d") {
    meta["eps"] = opt.spec.eps;
    meta["beta"] = opt.spec.beta;
    meta["r"] = opt.spec.r;
    meta["operator"] = "-eps*Laplacian + beta.grad (central) - r I";
  } else {
    meta["scale"] = opt.spec.scale;
    meta["operator"] = "scale * (-Laplacian)";
  }
  if (!opt.u0_output.empty()) {
    const auto u0 = initial_vector(opt.spec);
    write_vector(opt.u0_output, std::vector<cplx>(u0.begin(), u0.end()), true);
    meta["u0"] = opt.u0_output;
  }
  const std::string meta_path = opt.output + ".json";
  std::ofstream mf(meta_path);
  if (!mf) throw ParseError("cannot write " + meta_path);
  mf << meta.dump(2) << '\n';
  out << "wrote " << opt.output << " (" << describe(opt.spec) << ", " << A.rows() << " x " << A.cols() << ", nnz "
      << A.nnz() << ")\n";
  return ok;
}

SolverRun run_solver(const std::string& solver, const AnyCsrMatrix& A, const VectorData& b,
                     const std::vector<cplx>& shifts, const SolverConfig& cfg,
                     std::optional<std::size_t> seed_shift) {
  check_solver(solver);
  if (static_cast<index_t>(b.values.size()) != order(A))
    throw DimensionMismatch("right-hand side length does not match the operator");
  if (seed_shift && *seed_shift >= shifts.size())
    throw ConfigError("seed shift index " + std::to_string(*seed_shift) + " is out of range");
  const bool complex_seed = seed_shift && shifts[*seed_shift].imag() != 0.0;
  return dispatch(A, b, complex_seed, [&](const auto& M, const auto& rhs) {
    return run_typed(solver, M, rhs, shifts, cfg, seed_shift);
  });
}

int cmd_solve(const SolveOptions& opt, std::ostream& out) {
  const AnyCsrMatrix A = load_operator(opt.matrix);
  const VectorData b = make_vector(opt.rhs, order(A));
  const auto shifts = parse_shifts(opt.shifts);
  SolverConfig cfg;
  cfg.restart = opt.m;
  cfg.tol = opt.tol;
  cfg.max_mvps = opt.max_mvps;
  const auto run = run_solver(opt.solver, A, b, shifts, cfg, opt.seed_shift);

  if (opt.output.empty()) {
    write_solve(out, run.report, opt.format);
  } else {
    std::ofstream f(opt.output);
    if (!f) throw ParseError("cannot write " + opt.output);
    write_solve(f, run.report, opt.format);
  }
  if (!opt.solution_output.empty()) {
    std::ofstream f(opt.solution_output);
    if (!f) throw ParseError("cannot write " + opt.solution_output);
    bool real = true;
    for (const auto& x : run.solutions) real = real && all_real(x);
    f << std::setprecision(17);
    const std::size_t n = run.solutions.empty() ? 0 : run.solutions[0].size();
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t i = 0; i < run.solutions.size(); ++i) {
        if (i) f << ' ';
        f << run.solutions[i][q].real();
        if (!real) f << ' ' << run.solutions[i][q].imag();
      }
      f << '\n';
    }
  }
  return run.report.all_converged() ? ok : not_converged;
}

BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  BenchProblem defaults;
  bool in_section = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no);
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      const std::string inner = trim(t.substr(1, t.size() - 2));
      if (inner.rfind("problem", 0) != 0) throw ConfigError(where + ": expected [problem NAME]");
      BenchProblem p = defaults;
      p.name = trim(inner.substr(7));
      if (p.name.empty()) p.name = "problem" + std::to_string(cfg.problems.size() + 1);
      cfg.problems.push_back(std::move(p));
      in_section = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key == "solvers") {
      if (in_section) throw ConfigError(where + ": 'solvers' is a global key");
      cfg.solvers.clear();
      std::istringstream items(value);
      std::string s;
      while (std::getline(items, s, ',')) {
        s = trim(s);
        if (s.empty()) continue;
        check_solver(s);
        cfg.solvers.push_back(s);
      }
    } else if (key == "reps" || key == "repetitions") {
      if (in_section) throw ConfigError(where + ": '" + key + "' is a global key");
      long long r = 0;
      try {
        r = std::stoll(value);
      } catch (const std::exception&) {
        throw ConfigError(where + ": bad repetition count '" + value + "'");
      }
      if (r < 1) throw ConfigError(where + ": repetitions must be >= 1");
      cfg.reps = static_cast<std::size_t>(r);
    } else if (key == "format") {
      if (in_section) throw ConfigError(where + ": 'format' is a global key");
      cfg.format = parse_format(value);
    } else {
      apply_problem_key(in_section ? cfg.problems.back() : defaults, key, value, where);
    }
  }
  if (!in_section && (!defaults.matrix.empty() || defaults.generator)) {
    defaults.name = "problem";
    cfg.problems.push_back(defaults);
  }
  if (cfg.solvers.empty()) throw ConfigError("bench config: solver list is empty");
  if (cfg.problems.empty()) throw ConfigError("bench config: no problem defined");
  for (const auto& p : cfg.problems) {
    if (p.matrix.empty() == !p.generator)
      throw ConfigError("bench config: problem '" + p.name + "' needs exactly one of matrix or generator");
    if (p.m == 0) throw ConfigError("bench config: problem '" + p.name + "' has m = 0");
  }
  return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open bench config " + path);
  BenchConfig cfg = parse_bench_config(in);
  // Matrix paths are relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& p : cfg.problems)
    if (!p.matrix.empty() && std::filesystem::path(p.matrix).is_relative()) p.matrix = (base / p.matrix).string();
  return cfg;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg, bool parallel) {
  std::vector<std::vector<BenchRow>> per_problem(cfg.problems.size());
  if (parallel && cfg.problems.size() > 1) {
    std::vector<std::future<std::vector<BenchRow>>> jobs;
    for (const auto& p : cfg.problems)
      jobs.push_back(std::async(std::launch::async, [&cfg, &p] { return run_problem(p, cfg); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_problem[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < cfg.problems.size(); ++i) per_problem[i] = run_problem(cfg.problems[i], cfg);
  }
  std::vector<BenchRow> rows;
  for (auto& v : per_problem) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void write_bench(std::ostream& out, const std::vector<BenchRow>& rows, const BenchConfig& cfg) {
  const std::string timing = cfg.reps == 1 ? "time_ms is a single run"
                                           : "time_ms is the median of " + std::to_string(cfg.reps) + " runs";
  const std::vector<std::string> notes = {
      timing,
      "predicted_flops: closed-form per-cycle basis cost plus nu*m^2 reduced solves, times cycles; the pivot search is "
      "not counted",
      "dagger_flags: one character per shift, '.' converged, '" + std::string(dagger) +
          "' not converged within max_mvps",
      "mvps include one explicit-residual confirmation per converged shift"};
  if (cfg.format == Format::Csv) {
    out << "problem,solver,m,nu,cycles,mvps,time_ms,predicted_flops,converged_shifts,dagger_flags\n";
    for (const auto& r : rows)
      out << r.problem << ',' << r.solver << ',' << r.m << ',' << r.nu << ',' << r.cycles << ',' << r.mvps << ','
          << fixed(r.time_ms, 3) << ',' << r.predicted_flops << ',' << r.converged << ',' << r.dagger_flags << '\n';
    for (const auto& n : notes) out << "# " << n << '\n';
    return;
  }
  out << "| problem | solver | m | nu | cycles | MVPs | time (ms) | predicted flops | converged | flags |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows)
    out << "| " << r.problem << " | " << r.solver << " | " << r.m << " | " << r.nu << " | " << r.cycles << " | "
        << r.mvps << " | " << fixed(r.time_ms, 3) << " | " << r.predicted_flops << " | " << r.converged << "/" << r.nu
        << " | " << r.dagger_flags << " |\n";
  out << '\n';
  for (const auto& n : notes) out << "- " << n << '\n';
}

int cmd_bench(const std::string& config_path, bool parallel, std::optional<Format> format,
              const std::string& output, std::ostream& out) {
  BenchConfig cfg = load_bench_config(config_path);
  if (format) cfg.format = *format;
  const auto rows = run_bench(cfg, parallel);
  if (output.empty()) {
    write_bench(out, rows, cfg);
  } else {
    std::ofstream f(output);
    if (!f) throw ParseError("cannot write " + output);
    write_bench(f, rows, cfg);
  }
  const bool all = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.converged == r.nu; });
  return all ? ok : not_converged;
}

int cmd_matfunc(const MatfuncOptions& opt, std::ostream& out) {
  const QuadratureRule rule = load_quadrature(opt.rule);
  const AnyCsrMatrix A = load_operator(opt.matrix);
  const VectorData u0 = make_vector(opt.u0, order(A));
  SolverConfig cfg;
  cfg.restart = opt.m;
  cfg.tol = opt.tol;
  cfg.max_mvps = opt.max_mvps;

  struct Outcome {
    MatfuncResult result;
    std::optional<double> oracle_err;
    bool oracle_skipped = false;
  };
  const Outcome res = dispatch(A, u0, false, [&](const auto& M, const auto& u) {
    using T = typename std::decay_t<decltype(M)>::value_type;
    Outcome o{eval_rational_action(M, std::span<const T>(u), rule, cfg), std::nullopt, false};
    if (opt.dense_oracle) {
      if (M.rows() <= 500) {
        const auto ref = dense_matfunc_oracle(M, std::span<const T>(u), rule_function(rule));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
          num += std::norm(o.result.value[i] - ref[i]);
          den += std::norm(ref[i]);
        }
        o.oracle_err = std::sqrt(num / den);
      } else {
        o.oracle_skipped = true;
      }
    }
    return o;
  });

  const auto& rep = res.result.report;
  out << "# rule " << opt.rule << ": " << rule.size() << " nodes, "
      << (rule.kind == RuleKind::Exp ? std::string("exp") : "mittag_leffler gamma=" + std::to_string(rule.gamma))
      << '\n';
  out << "# cycles " << rep.cycles << ", MVPs " << rep.mvps << " (basis " << rep.basis_mvps << ", confirmation "
      << rep.confirmation_mvps << ", recovery " << rep.recovery_mvps << "), time " << fixed(rep.wall_ms, 3) << " ms\n";
  if (res.oracle_err) out << "# relative error vs dense oracle: " << sci(*res.oracle_err) << '\n';
  if (res.oracle_skipped) out << "# dense oracle skipped: order " << order(A) << " exceeds 500\n";
  const bool real = res.result.real_part || all_real(res.result.value);
  if (opt.output.empty())
    write_vector(out, res.result.value, real);
  else
    write_vector(opt.output, res.result.value, real);
  return ok;
}

}  // namespace shiftkrylov::cli
