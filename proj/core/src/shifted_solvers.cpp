#include "shiftkrylov/shifted_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "shiftkrylov/hessenberg_solve.hpp"

namespace shiftkrylov {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double stagnation_rel_change = 1e-15;
constexpr std::size_t stagnation_window = 3;
constexpr std::size_t stall_limit = 3;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool is_real(cplx z) { return z.imag() == 0.0; }

template <Scalar T>
cplx to_cplx(T v) {
  return cplx(v);
}

// Estimate unchanged to 1e-15 relative over the last three cycles.
bool stagnating(const std::vector<double>& est) {
  if (est.size() < stagnation_window + 1) return false;
  for (std::size_t t = est.size() - stagnation_window; t < est.size(); ++t) {
    const double prev = est[t - 1];
    if (std::abs(est[t] - prev) > stagnation_rel_change * prev) return false;
  }
  return true;
}

template <Scalar T, Scalar Y>
void accumulate_basis(const HessenbergDecomposition<T>& dec, std::span<const Y> y, std::vector<cplx>& x) {
  const auto n = static_cast<std::size_t>(dec.n);
  for (std::size_t j = 0; j < y.size(); ++j) {
    const auto lj = dec.column(j);
    const cplx yj = to_cplx(y[j]);
    if (yj == cplx{}) continue;
    for (std::size_t r = 0; r < n; ++r) x[r] += yj * to_cplx(lj[r]);
  }
}

// Galerkin solve of (H_k - sigma I) y = beta e1 in real arithmetic when
// every ingredient is real.
template <Scalar T>
std::vector<cplx> reduced_solve(const HessMatrix<T>& H, const HessMatrix<cplx>& Hc, cplx sigma, cplx beta) {
  if constexpr (!is_complex_v<T>) {
    if (is_real(sigma) && is_real(beta)) {
      const auto y = solve_shifted_hessenberg(H, sigma.real(), beta.real());
      return std::vector<cplx>(y.begin(), y.end());
    }
  }
  return solve_shifted_hessenberg(Hc, sigma, beta);
}

// Least-squares minimiser of ||beta e1 - (Hbar - sigma I) y|| by Givens
// rotations on the (k+1) x k extended matrix. Empty when R is rank deficient.
template <Scalar T>
std::vector<cplx> least_squares_step(const HessenbergDecomposition<T>& dec, cplx sigma, cplx beta) {
  const std::size_t k = dec.steps, ld = k + 1;
  std::vector<cplx> R(ld * k);
  double fro = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j + 1; ++i) {
      R[i + j * ld] = to_cplx(dec.h(i, j)) - (i == j ? sigma : cplx{});
      fro += std::norm(R[i + j * ld]);
    }
  std::vector<cplx> g(ld);
  g[0] = beta;
  for (std::size_t j = 0; j < k; ++j) {
    const cplx a = R[j + j * ld], b = R[j + 1 + j * ld];
    const double r = std::hypot(std::abs(a), std::abs(b));
    if (r == 0.0) continue;
    const cplx c = a / r, s = b / r;
    for (std::size_t q = j; q < k; ++q) {
      const cplx u = R[j + q * ld], w = R[j + 1 + q * ld];
      R[j + q * ld] = std::conj(c) * u + std::conj(s) * w;
      R[j + 1 + q * ld] = -s * u + c * w;
    }
    const cplx u = g[j], w = g[j + 1];
    g[j] = std::conj(c) * u + std::conj(s) * w;
    g[j + 1] = -s * u + c * w;
  }
  const double floor = std::numeric_limits<double>::epsilon() * std::sqrt(fro);
  std::vector<cplx> y(k);
  for (std::size_t j = k; j-- > 0;) {
    if (std::abs(R[j + j * ld]) <= floor) return {};
    cplx acc = g[j];
    for (std::size_t q = j + 1; q < k; ++q) acc -= R[j + q * ld] * y[q];
    y[j] = acc / R[j + j * ld];
  }
  return y;
}

template <Scalar T>
CsrMatrix<cplx> complexify(const CsrMatrix<T>& A) {
  std::vector<cplx> v(A.values().begin(), A.values().end());
  return CsrMatrix<cplx>(A.rows(), A.cols(), A.row_ptr(), A.col_idx(), std::move(v));
}

// A shift that left the shared basis keeps its residual as coef * vector and
// is advanced by its own restart cycles on A.
struct PrivateState {
  std::vector<cplx> vector;
  cplx coef{};
};

template <Scalar T>
class ShiftedDriver {
 public:
  ShiftedDriver(ProcessKind kind, const CsrMatrix<T>& A, std::span<const T> b, std::span<const cplx> shifts,
                const SolverConfig& cfg, const CycleObserver<T>& observer)
      : kind_(kind), A_(A), b_(b), cfg_(cfg), observer_(observer) {
    if (!A.square()) throw DimensionMismatch("shifted solve: operator must be square");
    if (static_cast<index_t>(b.size()) != A.rows())
      throw DimensionMismatch("shifted solve: right-hand side has length " + std::to_string(b.size()));
    if (cfg.restart == 0 || !(cfg.tol > 0.0)) throw ConfigError("shifted solve: need restart >= 1 and tol > 0");
    if (shifts.empty()) throw ConfigError("shifted solve: no shifts given");
    bnorm_ = norm2(b);
    if (bnorm_ == 0.0) throw ZeroStartVector("shifted solve: right-hand side is zero");
    m_ = std::min<std::size_t>(cfg.restart, static_cast<std::size_t>(A.rows()));

    const std::size_t nu = shifts.size();
    family_.shifts.assign(shifts.begin(), shifts.end());
    family_.active.assign(nu, true);
    family_.beta.assign(nu, cplx(1.0));
    desync_.assign(nu, false);
    private_.resize(nu);
    x_.assign(nu, std::vector<cplx>(b.size(), cplx{}));

    report_.solver = kind == ProcessKind::Hessenberg ? "shessen" : "sfom";
    report_.process = kind;
    report_.restart = m_;
    report_.shifts.resize(nu);
    for (std::size_t i = 0; i < nu; ++i) report_.shifts[i].shift = shifts[i];
  }

  ShiftedSolveResult run() {
    const auto start = Clock::now();
    std::vector<T> v(b_.begin(), b_.end());
    std::size_t all_skipped_streak = 0;

    while (any_active() && total_mvps() < cfg_.max_mvps) {
      bool any_advanced = false;
      bool any_attempted = false;
      std::vector<bool> skipped_now(family_.shifts.size(), false);
      std::optional<HessenbergDecomposition<T>> dec;
      if (any_synchronized()) {
        dec = run_process(kind_, A_, std::span<const T>(v), m_, &basis_counter_);
        any_attempted = true;
        any_advanced = shared_cycle(*dec, skipped_now);
        report_.breakdown = report_.breakdown || dec->breakdown;
      }

      // Shifts skipped in earlier cycles advance privately.
      for (std::size_t i = 0; i < family_.shifts.size(); ++i) {
        if (!family_.active[i] || !desync_[i] || skipped_now[i]) continue;
        any_attempted = true;
        if (advance_private(i)) any_advanced = true;
      }

      ++report_.cycles;
      const bool breakdown = dec && dec->breakdown;
      if (observer_) {
        const std::span<const T> next = (!dec || breakdown) ? std::span<const T>{} : dec->column(dec->steps);
        observer_(CycleSnapshot<T>{report_.cycles, next, family_, x_, desync_});
      }

      eliminate(breakdown);
      for (std::size_t i = 0; i < family_.shifts.size(); ++i)
        if (family_.active[i] && stagnating(report_.shifts[i].estimates)) report_.shifts[i].stagnated = true;

      all_skipped_streak = (any_attempted && !any_advanced) ? all_skipped_streak + 1 : 0;
      if (all_skipped_streak >= stall_limit)
        throw AllShiftsStalled("shifted solve: every active shift hit a singular reduced system for " +
                               std::to_string(stall_limit) + " consecutive cycles");

      if (!any_active() || !dec) continue;
      if (breakdown) {
        // No l_{k+1} to restart from: remaining shared shifts continue from
        // their explicit residuals.
        for (std::size_t i = 0; i < family_.shifts.size(); ++i) {
          if (!family_.active[i] || desync_[i]) continue;
          desync_[i] = true;
          report_.shifts[i].desynchronized = true;
          private_[i].vector = explicit_residual(i, &recovery_counter_);
          private_[i].coef = cplx(1.0);
        }
        continue;
      }
      const auto next = dec->column(dec->steps);
      v.assign(next.begin(), next.end());
    }

    finalize();
    report_.wall_ms = elapsed_ms(start);
    return ShiftedSolveResult{std::move(x_), std::move(report_)};
  }

 private:
  bool any_synchronized() const {
    for (std::size_t i = 0; i < family_.shifts.size(); ++i)
      if (family_.active[i] && !desync_[i]) return true;
    return false;
  }

  // Galerkin step for every synchronised shift on the shared basis. Returns
  // true when at least one shift advanced.
  bool shared_cycle(const HessenbergDecomposition<T>& dec, std::vector<bool>& skipped_now) {
    const std::size_t k = dec.steps;
    const HessMatrix<T> H = dec.square();
    const HessMatrix<cplx> Hc = H.template cast<cplx>();
    const cplx h_sub = to_cplx(dec.subdiagonal());
    const double next_norm = dec.breakdown ? 0.0 : norm2(dec.column(k));
    bool any_advanced = false;
    for (std::size_t i = 0; i < family_.shifts.size(); ++i) {
      if (!family_.active[i] || desync_[i]) continue;
      // r_i = beta_i * v = beta_i * dec.beta * l_1.
      const cplx beta = family_.beta[i] * to_cplx(dec.beta);
      std::vector<cplx> y;
      try {
        y = reduced_solve(H, Hc, family_.shifts[i], beta);
      } catch (const SingularReducedSystem&) {
        // x_i and the residual beta * l_1 stay as they are.
        skipped_now[i] = true;
        ++report_.shifts[i].skipped_cycles;
        desync_[i] = true;
        report_.shifts[i].desynchronized = true;
        private_[i].coef = beta;
        private_[i].vector.assign(dec.column(0).begin(), dec.column(0).end());
        continue;
      }
      any_advanced = true;
      accumulate_basis(dec, std::span<const cplx>(y), x_[i]);
      family_.beta[i] = collinearity_scalar(h_sub, std::span<const cplx>(y));
      auto& out = report_.shifts[i];
      ++out.cycles;
      out.estimates.push_back(std::abs(family_.beta[i]) * next_norm / bnorm_);
    }
    return any_advanced;
  }

  bool any_active() const { return std::find(family_.active.begin(), family_.active.end(), true) != family_.active.end(); }

  std::int64_t total_mvps() const {
    return basis_counter_.count + confirm_counter_.count + recovery_counter_.count;
  }

  std::vector<cplx> explicit_residual(std::size_t i, MvpCounter* counter) const {
    const auto Ax = matvec(A_, std::span<const cplx>(x_[i]), counter);
    std::vector<cplx> r(b_.size());
    for (std::size_t q = 0; q < r.size(); ++q) r[q] = to_cplx(b_[q]) - (Ax[q] - family_.shifts[i] * x_[i][q]);
    return r;
  }

  const CsrMatrix<cplx>& complex_operator() {
    if constexpr (is_complex_v<T>) {
      return A_;
    } else {
      if (!complex_A_) complex_A_ = complexify(A_);
      return *complex_A_;
    }
  }

  // One private restart cycle. A singular Galerkin system is replaced by a
  // minimal-residual step on an Arnoldi basis, after which the residual is
  // recomputed explicitly.
  bool advance_private(std::size_t i) {
    auto& st = private_[i];
    const auto& Ac = complex_operator();
    const auto dec = run_process(kind_, Ac, std::span<const cplx>(st.vector), m_, &recovery_counter_);
    const cplx beta = st.coef * dec.beta;
    auto& out = report_.shifts[i];
    try {
      const auto y = solve_shifted_hessenberg(dec.square(), family_.shifts[i], beta);
      accumulate_basis(dec, std::span<const cplx>(y), x_[i]);
      ++out.cycles;
      if (dec.breakdown) {
        st.coef = cplx{};
        out.estimates.push_back(0.0);
      } else {
        st.coef = collinearity_scalar(dec.subdiagonal(), std::span<const cplx>(y));
        const auto next = dec.column(dec.steps);
        st.vector.assign(next.begin(), next.end());
        out.estimates.push_back(std::abs(st.coef) * norm2(std::span<const cplx>(st.vector)) / bnorm_);
      }
      return true;
    } catch (const SingularReducedSystem&) {
    }
    // The minimal-residual step needs an orthonormal basis.
    const auto ortho = kind_ == ProcessKind::Arnoldi
                           ? dec
                           : run_process(ProcessKind::Arnoldi, Ac, std::span<const cplx>(st.vector), m_,
                                         &recovery_counter_);
    const auto y = least_squares_step(ortho, family_.shifts[i], st.coef * ortho.beta);
    if (y.empty()) {
      ++out.skipped_cycles;
      return false;
    }
    const double before = std::abs(st.coef) * norm2(std::span<const cplx>(st.vector));
    accumulate_basis(ortho, std::span<const cplx>(y), x_[i]);
    st.vector = explicit_residual(i, &recovery_counter_);
    st.coef = cplx(1.0);
    const double after = norm2(std::span<const cplx>(st.vector));
    if (!(after < before)) {
      ++out.skipped_cycles;
      return false;
    }
    ++out.cycles;
    out.estimates.push_back(after / bnorm_);
    return true;
  }

  void eliminate(bool breakdown) {
    for (std::size_t i = 0; i < family_.shifts.size(); ++i) {
      if (!family_.active[i]) continue;
      const auto& est = report_.shifts[i].estimates;
      if (est.empty()) continue;
      const bool fresh = report_.shifts[i].cycles > 0 && (est.back() <= cfg_.tol || (breakdown && !desync_[i]));
      if (!fresh) continue;
      if (cfg_.true_residual_check) {
        const auto r = explicit_residual(i, &confirm_counter_);
        const double rel = norm2(std::span<const cplx>(r)) / bnorm_;
        if (!(rel <= cfg_.tol)) continue;
        report_.shifts[i].true_residual = rel;
      }
      family_.active[i] = false;
      report_.shifts[i].converged = true;
    }
  }

  void finalize() {
    for (std::size_t i = 0; i < family_.shifts.size(); ++i) {
      auto& out = report_.shifts[i];
      if (std::isnan(out.true_residual)) {
        // Reporting only; not part of the solve's product count.
        const auto r = explicit_residual(i, nullptr);
        out.true_residual = norm2(std::span<const cplx>(r)) / bnorm_;
      }
    }
    report_.basis_mvps = basis_counter_.count;
    report_.confirmation_mvps = confirm_counter_.count;
    report_.recovery_mvps = recovery_counter_.count;
    report_.mvps = total_mvps();
  }

  ProcessKind kind_;
  const CsrMatrix<T>& A_;
  std::span<const T> b_;
  SolverConfig cfg_;
  const CycleObserver<T>& observer_;
  double bnorm_ = 0.0;
  std::size_t m_ = 0;

  ShiftFamily family_;
  std::vector<bool> desync_;
  std::vector<PrivateState> private_;
  std::vector<std::vector<cplx>> x_;
  SolveReport report_;
  MvpCounter basis_counter_;
  MvpCounter confirm_counter_;
  MvpCounter recovery_counter_;
  std::optional<CsrMatrix<cplx>> complex_A_;
};

}  // namespace

bool SolveReport::all_converged() const {
  return std::all_of(shifts.begin(), shifts.end(), [](const ShiftOutcome& s) { return s.converged; });
}

std::size_t SolveReport::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(shifts.begin(), shifts.end(), [](const ShiftOutcome& s) { return s.converged; }));
}

template <Scalar T, Scalar X>
double true_relative_residual(const CsrMatrix<T>& A, cplx sigma, std::span<const X> x, std::span<const T> b,
                              MvpCounter* counter) {
  if (static_cast<index_t>(b.size()) != A.rows() || x.size() != b.size())
    throw DimensionMismatch("true_relative_residual: vector lengths do not match the operator");
  const auto Ax = matvec(A, x, counter);
  std::vector<cplx> r(b.size());
  for (std::size_t q = 0; q < r.size(); ++q) r[q] = cplx(b[q]) - (cplx(Ax[q]) - sigma * cplx(x[q]));
  return norm2(std::span<const cplx>(r)) / norm2(b);
}

template <Scalar T>
SolveResult<T> solve_hessen(const CsrMatrix<T>& A, std::span<const T> b, std::span<const T> x0,
                            const SolverConfig& cfg) {
  const auto start = Clock::now();
  if (!A.square()) throw DimensionMismatch("solve_hessen: operator must be square");
  const auto n = static_cast<std::size_t>(A.rows());
  if (b.size() != n || (!x0.empty() && x0.size() != n))
    throw DimensionMismatch("solve_hessen: vector lengths do not match the operator");
  if (cfg.restart == 0 || !(cfg.tol > 0.0)) throw ConfigError("solve_hessen: need restart >= 1 and tol > 0");
  const double bnorm = norm2(b);
  if (bnorm == 0.0) throw ZeroStartVector("solve_hessen: right-hand side is zero");
  const std::size_t m = std::min(cfg.restart, n);

  SolveReport report;
  report.solver = "hessen";
  report.process = ProcessKind::Hessenberg;
  report.restart = m;
  report.shifts.resize(1);
  auto& out = report.shifts[0];

  MvpCounter setup, basis, confirm;
  std::vector<T> x(n, T{});
  std::vector<T> v(b.begin(), b.end());
  if (!x0.empty()) {
    x.assign(x0.begin(), x0.end());
    if (std::any_of(x.begin(), x.end(), [](const T& e) { return e != T{}; })) {
      const auto Ax = matvec(A, std::span<const T>(x), &setup);
      for (std::size_t q = 0; q < n; ++q) v[q] = b[q] - Ax[q];
    }
  }
  T coef = T(1.0);

  auto residual = [&](MvpCounter* counter) {
    const auto Ax = matvec(A, std::span<const T>(x), counter);
    std::vector<T> r(n);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - Ax[q];
    return r;
  };

  while (basis.count + confirm.count + setup.count < cfg.max_mvps) {
    if (norm2(std::span<const T>(v)) == 0.0 || coef == T{}) {
      out.converged = true;
      break;
    }
    const auto dec = run_hessenberg(A, std::span<const T>(v), m, &basis);
    report.breakdown = report.breakdown || dec.breakdown;
    std::vector<T> rhs(dec.steps, T{});
    rhs[0] = coef * dec.beta;
    const auto y = solve_hessenberg(dec.square(), std::span<const T>(rhs));
    for (std::size_t j = 0; j < y.size(); ++j) {
      const auto lj = dec.column(j);
      for (std::size_t q = 0; q < n; ++q) x[q] += y[j] * lj[q];
    }
    coef = collinearity_scalar(dec.subdiagonal(), std::span<const T>(y));
    const double next_norm = dec.breakdown ? 0.0 : norm2(dec.column(dec.steps));
    ++report.cycles;
    ++out.cycles;
    out.estimates.push_back(std::abs(coef) * next_norm / bnorm);
    if (stagnating(out.estimates)) out.stagnated = true;

    if (out.estimates.back() <= cfg.tol || dec.breakdown) {
      if (!cfg.true_residual_check) {
        out.converged = true;
        break;
      }
      auto r = residual(&confirm);
      const double rel = norm2(std::span<const T>(r)) / bnorm;
      if (rel <= cfg.tol) {
        out.converged = true;
        out.true_residual = rel;
        break;
      }
      // Estimate drifted from the true residual: restart from the latter.
      v = std::move(r);
      coef = T(1.0);
      continue;
    }
    const auto next = dec.column(dec.steps);
    v.assign(next.begin(), next.end());
  }

  if (std::isnan(out.true_residual)) {
    const auto r = residual(nullptr);
    out.true_residual = norm2(std::span<const T>(r)) / bnorm;
  }
  report.basis_mvps = basis.count;
  report.confirmation_mvps = confirm.count;
  report.setup_mvps = setup.count;
  report.mvps = basis.count + confirm.count + setup.count;
  report.wall_ms = elapsed_ms(start);
  return SolveResult<T>{std::move(x), std::move(report)};
}

template <Scalar T>
ShiftedSolveResult solve_shifted_hessen(const CsrMatrix<T>& A, std::span<const T> b, std::span<const cplx> shifts,
                                        const SolverConfig& cfg, const CycleObserver<T>& observer) {
  return ShiftedDriver<T>(ProcessKind::Hessenberg, A, b, shifts, cfg, observer).run();
}

template <Scalar T>
ShiftedSolveResult solve_shifted_fom(const CsrMatrix<T>& A, std::span<const T> b, std::span<const cplx> shifts,
                                     const SolverConfig& cfg, const CycleObserver<T>& observer) {
  return ShiftedDriver<T>(ProcessKind::Arnoldi, A, b, shifts, cfg, observer).run();
}

template <Scalar T>
SeededFamily<T> absorb_seed_shift(const CsrMatrix<T>& A, std::span<const cplx> shifts, std::size_t seed_index) {
  if (seed_index >= shifts.size()) throw ConfigError("absorb_seed_shift: seed index out of range");
  const cplx seed = shifts[seed_index];
  std::vector<cplx> translated(shifts.begin(), shifts.end());
  for (auto& s : translated) s -= seed;
  translated[seed_index] = cplx{};
  if constexpr (is_complex_v<T>) {
    return {shift_diagonal(A, seed), std::move(translated)};
  } else {
    if (!is_real(seed)) throw ConfigError("absorb_seed_shift: a complex seed shift needs a complex operator");
    return {shift_diagonal(A, seed.real()), std::move(translated)};
  }
}

template double true_relative_residual(const CsrMatrix<double>&, cplx, std::span<const double>,
                                       std::span<const double>, MvpCounter*);
template double true_relative_residual(const CsrMatrix<double>&, cplx, std::span<const cplx>,
                                       std::span<const double>, MvpCounter*);
template double true_relative_residual(const CsrMatrix<cplx>&, cplx, std::span<const cplx>, std::span<const cplx>,
                                       MvpCounter*);
template SolveResult<double> solve_hessen(const CsrMatrix<double>&, std::span<const double>, std::span<const double>,
                                          const SolverConfig&);
template SolveResult<cplx> solve_hessen(const CsrMatrix<cplx>&, std::span<const cplx>, std::span<const cplx>,
                                        const SolverConfig&);
template ShiftedSolveResult solve_shifted_hessen(const CsrMatrix<double>&, std::span<const double>,
                                                 std::span<const cplx>, const SolverConfig&,
                                                 const CycleObserver<double>&);
template ShiftedSolveResult solve_shifted_hessen(const CsrMatrix<cplx>&, std::span<const cplx>, std::span<const cplx>,
                                                 const SolverConfig&, const CycleObserver<cplx>&);
template ShiftedSolveResult solve_shifted_fom(const CsrMatrix<double>&, std::span<const double>,
                                              std::span<const cplx>, const SolverConfig&,
                                              const CycleObserver<double>&);
template ShiftedSolveResult solve_shifted_fom(const CsrMatrix<cplx>&, std::span<const cplx>, std::span<const cplx>,
                                              const SolverConfig&, const CycleObserver<cplx>&);
template SeededFamily<double> absorb_seed_shift(const CsrMatrix<double>&, std::span<const cplx>, std::size_t);
template SeededFamily<cplx> absorb_seed_shift(const CsrMatrix<cplx>&, std::span<const cplx>, std::size_t);

}  // namespace shiftkrylov
