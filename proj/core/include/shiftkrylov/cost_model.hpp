#pragma once

#include <cstdint>
#include <string_view>

namespace shiftkrylov {

enum class CostProcess { Hessenberg, Arnoldi, WeightedArnoldi };

std::string_view to_string(CostProcess p) noexcept;

/// Flop counts of one restart cycle (m steps) of the basis construction,
/// neglecting the pivot search, plus the nu m^2 reduced-solve term.
struct CostEstimate {
  CostProcess process = CostProcess::Hessenberg;
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t nz = 0;
  std::int64_t nu = 0;
  std::int64_t cycles = 0;
  std::int64_t flops_per_cycle = 0;
  /// nu * m^2 per cycle.
  std::int64_t reduced_solve_cost = 0;
  /// cycles * (flops_per_cycle + reduced_solve_cost).
  std::int64_t total = 0;
};

/// Exact integer flop count per cycle:
///   hessenberg        2 m Nz + m (m+1) n - m (m-1) (m+1) / 3
///   arnoldi           2 m Nz + 2 m (m+1) n
///   weighted_arnoldi  2 m Nz + 5/2 m (m+1) n
/// Throws InvalidDimensions unless m >= 1, n >= m, Nz >= 0, or on overflow.
std::int64_t predicted_flops(CostProcess process, std::int64_t m, std::int64_t n, std::int64_t nz);

struct SolveReport;

/// Fill report.cost from report.restart, report.cycles and the shift count.
SolveReport attach_costs(SolveReport report, CostProcess process, std::int64_t n, std::int64_t nz);

}  // namespace shiftkrylov
