#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftkrylov/cost_model.hpp"
#include "shiftkrylov/csr_matrix.hpp"
#include "shiftkrylov/krylov_process.hpp"

namespace shiftkrylov {

struct SolverConfig {
  /// Krylov dimension per cycle; clamped to n.
  std::size_t restart = 30;
  /// Target for ||b - (A - sigma I) x||_2 / ||b||_2.
  double tol = 1e-8;
  std::int64_t max_mvps = 4000;
  /// Confirm each elimination with one explicit residual (one MVP).
  bool true_residual_check = true;
};

/// Shift list and per-shift collinearity state. Between cycles the residual
/// of every synchronised active shift is beta[i] times the next start vector
/// l_{m+1} (the right-hand side before the first cycle).
struct ShiftFamily {
  std::vector<cplx> shifts;
  std::vector<bool> active;
  std::vector<cplx> beta;
};

struct ShiftOutcome {
  cplx shift{};
  bool converged = false;
  /// Cycles in which the shift was advanced (including private ones).
  std::size_t cycles = 0;
  /// ||b - (A - sigma I) x||_2 / ||b||_2 at the end of the solve.
  double true_residual = std::numeric_limits<double>::quiet_NaN();
  /// |beta| ||l_{m+1}||_2 / ||b||_2 after each cycle.
  std::vector<double> estimates;
  bool stagnated = false;
  std::size_t skipped_cycles = 0;
  /// Left the shared basis after a singular reduced system.
  bool desynchronized = false;
};

struct SolveReport {
  std::string solver;
  ProcessKind process = ProcessKind::Hessenberg;
  std::size_t restart = 0;
  std::size_t cycles = 0;
  /// All counted products: basis + confirmations + recovery + setup.
  std::int64_t mvps = 0;
  std::int64_t basis_mvps = 0;
  std::int64_t confirmation_mvps = 0;
  /// Private cycles of desynchronised shifts.
  std::int64_t recovery_mvps = 0;
  /// Initial residual b - A x0 when x0 != 0.
  std::int64_t setup_mvps = 0;
  bool breakdown = false;
  double wall_ms = 0.0;
  std::vector<ShiftOutcome> shifts;
  std::optional<CostEstimate> cost;

  bool all_converged() const;
  std::size_t converged_count() const;
};

/// State handed to an observer at the end of each shared cycle, after the
/// solution and coefficient updates and before elimination.
template <Scalar T>
struct CycleSnapshot {
  std::size_t cycle;
  /// l_{k+1}; empty after a breakdown.
  std::span<const T> next_basis_vector;
  const ShiftFamily& family;
  const std::vector<std::vector<cplx>>& solutions;
  const std::vector<bool>& desynchronized;
};

template <Scalar T>
using CycleObserver = std::function<void(const CycleSnapshot<T>&)>;

template <Scalar T>
struct SolveResult {
  std::vector<T> x;
  SolveReport report;
};

struct ShiftedSolveResult {
  std::vector<std::vector<cplx>> solutions;
  SolveReport report;
};

/// ||b - (A - sigma I) x||_2 / ||b||_2 with one product on `counter`.
template <Scalar T, Scalar X>
double true_relative_residual(const CsrMatrix<T>& A, cplx sigma, std::span<const X> x, std::span<const T> b,
                              MvpCounter* counter = nullptr);

/// Restarted Hessenberg method for A x = b. An empty x0 means zero.
template <Scalar T>
SolveResult<T> solve_hessen(const CsrMatrix<T>& A, std::span<const T> b, std::span<const T> x0,
                            const SolverConfig& cfg);

/// Restarted shifted Hessenberg method: every (A - sigma_i I) x = b from one
/// basis per cycle, x0 = 0.
template <Scalar T>
ShiftedSolveResult solve_shifted_hessen(const CsrMatrix<T>& A, std::span<const T> b, std::span<const cplx> shifts,
                                        const SolverConfig& cfg, const CycleObserver<T>& observer = {});

/// Restarted shifted FOM: same control flow on an Arnoldi basis.
template <Scalar T>
ShiftedSolveResult solve_shifted_fom(const CsrMatrix<T>& A, std::span<const T> b, std::span<const cplx> shifts,
                                     const SolverConfig& cfg, const CycleObserver<T>& observer = {});

/// Replace A by A - sigma_s I and every sigma_i by sigma_i - sigma_s so that
/// the basis is built on the chosen seed system.
template <Scalar T>
struct SeededFamily {
  CsrMatrix<T> matrix;
  std::vector<cplx> shifts;
};

template <Scalar T>
SeededFamily<T> absorb_seed_shift(const CsrMatrix<T>& A, std::span<const cplx> shifts, std::size_t seed_index);

}  // namespace shiftkrylov
