#include "shiftkrylov/cost_model.hpp"

#include <string>

#include "shiftkrylov/error.hpp"
#include "shiftkrylov/shifted_solvers.hpp"

namespace shiftkrylov {

namespace {

std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw InvalidDimensions("cost model: flop count overflows int64");
  return out;
}

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw InvalidDimensions("cost model: flop count overflows int64");
  return out;
}

}  // namespace

std::string_view to_string(CostProcess p) noexcept {
  switch (p) {
    case CostProcess::Hessenberg: return "hessenberg";
    case CostProcess::Arnoldi: return "arnoldi";
    case CostProcess::WeightedArnoldi: return "weighted_arnoldi";
  }
  return "unknown";
}

std::int64_t predicted_flops(CostProcess process, std::int64_t m, std::int64_t n, std::int64_t nz) {
  if (m < 1 || n < m || nz < 0)
    throw InvalidDimensions("predicted_flops: need m >= 1, n >= m, Nz >= 0 (got m=" + std::to_string(m) +
                            ", n=" + std::to_string(n) + ", Nz=" + std::to_string(nz) + ")");
  const std::int64_t products = mul(mul(2, m), nz);
  const std::int64_t mm1n = mul(mul(m, m + 1), n);
  switch (process) {
    case CostProcess::Hessenberg: {
      // (m-1) m (m+1) is a product of three consecutive integers.
      const std::int64_t cubic = mul(mul(m - 1, m), m + 1) / 3;
      return add(products, mm1n - cubic);
    }
    case CostProcess::Arnoldi: return add(products, mul(2, mm1n));
    case CostProcess::WeightedArnoldi:
      // m (m+1) is even.
      return add(products, mul(5, mm1n / 2));
  }
  throw InvalidDimensions("predicted_flops: unknown process");
}

SolveReport attach_costs(SolveReport report, CostProcess process, std::int64_t n, std::int64_t nz) {
  CostEstimate c;
  c.process = process;
  c.m = static_cast<std::int64_t>(report.restart);
  c.n = n;
  c.nz = nz;
  c.nu = static_cast<std::int64_t>(report.shifts.size());
  c.cycles = static_cast<std::int64_t>(report.cycles);
  c.flops_per_cycle = predicted_flops(process, c.m, n, nz);
  c.reduced_solve_cost = mul(c.nu, mul(c.m, c.m));
  c.total = mul(c.cycles, add(c.flops_per_cycle, c.reduced_solve_cost));
  report.cost = c;
  return report;
}

}  // namespace shiftkrylov
