#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <shiftkrylov/krylov_process.hpp>
#include <shiftkrylov/problems.hpp>
#include <shiftkrylov/shifted_solvers.hpp>

using namespace shiftkrylov;

namespace {

const CsrMatrix<double>& convdiff(index_t n) {
  static std::vector<std::pair<index_t, CsrMatrix<double>>> cache;
  for (const auto& [k, A] : cache)
    if (k == n) return A;
  const double s5 = std::sqrt(5.0);
  cache.emplace_back(n, gen_convdiff3d(n, 1.0, {0.0, 25.0 / s5, 50.0 / s5}, 0.0));
  return cache.back().second;
}

void BM_matvec(benchmark::State& state) {
  const auto& A = convdiff(state.range(0));
  std::vector<double> x(static_cast<std::size_t>(A.rows()), 1.0), y(x.size());
  for (auto _ : state) {
    matvec(A, std::span<const double>(x), std::span<double>(y));
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["n"] = double(A.rows());
}
BENCHMARK(BM_matvec)->Arg(10)->Arg(20)->Arg(30);

template <ProcessKind Kind>
void BM_process(benchmark::State& state) {
  const auto& A = convdiff(20);
  const std::vector<double> v(static_cast<std::size_t>(A.rows()), 1.0);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto dec = run_process(Kind, A, std::span<const double>(v), m);
    benchmark::DoNotOptimize(dec.hbar.data());
  }
}
BENCHMARK_TEMPLATE(BM_process, ProcessKind::Hessenberg)->Arg(10)->Arg(30)->Arg(60);
BENCHMARK_TEMPLATE(BM_process, ProcessKind::Arnoldi)->Arg(10)->Arg(30)->Arg(60);

template <bool Fom>
void BM_shifted_solve(benchmark::State& state) {
  const auto& A = convdiff(12);
  const std::vector<double> b(static_cast<std::size_t>(A.rows()), 1.0);
  const auto shifts = gen_shifts(ShiftSpec::arithmetic(1e-3, static_cast<std::size_t>(state.range(0))));
  SolverConfig cfg;
  cfg.restart = 30;
  std::int64_t mvps = 0;
  for (auto _ : state) {
    const auto res = Fom ? solve_shifted_fom(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg)
                         : solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
    mvps = res.report.mvps;
    benchmark::DoNotOptimize(res.solutions.data());
  }
  state.counters["mvps"] = double(mvps);
}
BENCHMARK_TEMPLATE(BM_shifted_solve, false)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_shifted_solve, true)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
