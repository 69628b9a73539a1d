#include <catch_amalgamated.hpp>

#include <shiftkrylov/error.hpp>
#include <shiftkrylov/problems.hpp>
#include <shiftkrylov/shifted_solvers.hpp>

#include "test_support.hpp"

using namespace shiftkrylov;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CsrMatrix<double> scaled_identity(index_t n, double s) {
  std::vector<Triplet<double>> t;
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, s});
  return from_triplets<double>(n, n, t);
}

/// Tridiagonal [-1, d, -1] with d on the diagonal.
CsrMatrix<double> laplace_like(index_t n, double d) {
  std::vector<Triplet<double>> t;
  for (index_t i = 0; i < n; ++i) {
    t.push_back({i, i, d});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return from_triplets<double>(n, n, t);
}

double max_abs_diff(const std::vector<cplx>& x, double value) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v - value));
  return m;
}

}  // namespace

TEST_CASE("true_relative_residual examples") {
  const auto A = scaled_identity(2, 2.0);
  const std::vector<double> b{1, 1};
  const std::vector<double> exact{1, 1}, zero{0, 0}, off{2, 0};
  MvpCounter counter;
  CHECK_THAT(true_relative_residual(A, cplx(1.0), std::span<const double>(exact), std::span<const double>(b), &counter),
             WithinAbs(0.0, 1e-16));
  CHECK(true_relative_residual(A, cplx(1.0), std::span<const double>(zero), std::span<const double>(b)) == 1.0);
  CHECK_THAT(true_relative_residual(A, cplx(1.0), std::span<const double>(off), std::span<const double>(b)),
             WithinAbs(1.0, 1e-15));
  CHECK(counter.count == 1);
  const std::vector<double> bad{1};
  CHECK_THROWS_AS(true_relative_residual(A, cplx(1.0), std::span<const double>(bad), std::span<const double>(b)),
                  DimensionMismatch);
}

TEST_CASE("solve_hessen examples") {
  SolverConfig cfg;
  SECTION("identity converges through breakdown") {
    testing::Rng rng(1);
    const auto b = rng.vector<double>(7);
    const auto res = solve_hessen(CsrMatrix<double>::identity(7), std::span<const double>(b), {}, cfg);
    CHECK(res.report.cycles == 1);
    CHECK(res.report.breakdown);
    CHECK(res.report.all_converged());
    CHECK(testing::rel_diff(res.x, b) <= 1e-15);
  }
  SECTION("2I with m = 1") {
    cfg.restart = 1;
    const std::vector<double> b{1, 1, 1};
    const auto res = solve_hessen(scaled_identity(3, 2.0), std::span<const double>(b), {}, cfg);
    CHECK(res.report.cycles == 1);
    for (double x : res.x) CHECK_THAT(x, WithinAbs(0.5, 1e-15));
  }
  SECTION("shifted 1D Laplacian, m = 10") {
    cfg.restart = 10;
    testing::Rng rng(2);
    const auto A = laplace_like(100, 4.0);
    const auto b = rng.vector<double>(100);
    const auto res = solve_hessen(A, std::span<const double>(b), {}, cfg);
    REQUIRE(res.report.all_converged());
    const auto& out = res.report.shifts[0];
    CHECK(out.true_residual <= 1e-8);
    CHECK_THAT(out.estimates.back(), WithinRel(out.true_residual, 1e-6));
    CHECK(testing::rel_diff(res.x, testing::dense_shifted_solve(A, 0.0, std::span<const double>(b))) <= 1e-7);
  }
  SECTION("nonzero x0 costs one setup product") {
    cfg.restart = 10;
    const auto A = laplace_like(50, 4.0);
    const std::vector<double> b(50, 1.0), x0(50, 0.1);
    const auto res = solve_hessen(A, std::span<const double>(b), std::span<const double>(x0), cfg);
    CHECK(res.report.setup_mvps == 1);
    CHECK(res.report.all_converged());
    CHECK(res.report.mvps ==
          res.report.basis_mvps + res.report.confirmation_mvps + res.report.setup_mvps + res.report.recovery_mvps);
  }
}

TEST_CASE("solve_shifted_hessen examples") {
  SolverConfig cfg;
  SECTION("2I with shifts {0, 1}") {
    cfg.restart = 1;
    const std::vector<double> b(3, 1.0);
    const std::vector<cplx> shifts{0.0, 1.0};
    const auto res = solve_shifted_hessen(scaled_identity(3, 2.0), std::span<const double>(b),
                                          std::span<const cplx>(shifts), cfg);
    CHECK(res.report.cycles == 1);
    CHECK(res.report.all_converged());
    CHECK(max_abs_diff(res.solutions[0], 0.5) <= 1e-15);
    CHECK(max_abs_diff(res.solutions[1], 1.0) <= 1e-15);
  }
  SECTION("identity with shift 0.5") {
    const std::vector<double> b(4, 1.0);
    const std::vector<cplx> shifts{0.5};
    const auto res = solve_shifted_hessen(CsrMatrix<double>::identity(4), std::span<const double>(b),
                                          std::span<const cplx>(shifts), cfg);
    CHECK(res.report.breakdown);
    CHECK(max_abs_diff(res.solutions[0], 2.0) <= 1e-15);
  }
  SECTION("complex shifts on real data") {
    testing::Rng rng(4);
    const auto A = testing::random_sparse<double>(rng, 120, 0.03, 6.0);
    const auto b = rng.vector<double>(120);
    const std::vector<cplx> shifts{{0.0, 1.0}, {-1.0, -2.0}, {0.5, 0.0}};
    cfg.restart = 20;
    const auto res = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
    REQUIRE(res.report.all_converged());
    for (std::size_t i = 0; i < shifts.size(); ++i)
      CHECK(testing::rel_diff(res.solutions[i], testing::dense_shifted_solve(A, shifts[i], std::span<const double>(b))) <=
            1e-7);
  }
}

TEST_CASE("solve_shifted_fom examples") {
  SolverConfig cfg;
  cfg.restart = 1;
  const std::vector<double> b(3, 1.0);
  const std::vector<cplx> shifts{0.0, 1.0};
  const auto A = scaled_identity(3, 2.0);
  const auto fom = solve_shifted_fom(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  const auto hes = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  CHECK(fom.report.process == ProcessKind::Arnoldi);
  for (std::size_t i = 0; i < 2; ++i) CHECK(testing::rel_diff(fom.solutions[i], hes.solutions[i]) <= 1e-14);

  cfg.restart = 5;
  const std::vector<double> ones(6, 1.0);
  const auto id = solve_shifted_fom(CsrMatrix<double>::identity(6), std::span<const double>(ones),
                                    std::span<const cplx>(shifts.data(), 1), cfg);
  CHECK(id.report.cycles == 1);
  CHECK(id.report.breakdown);
}

TEST_CASE("singular reduced system triggers a private recovery") {
  // H_2 = [[1,1],[1,1]] for sigma = 0 in the first cycle.
  const index_t n = 6;
  std::vector<Triplet<double>> trip{{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  for (index_t i = 1; i + 1 < n; ++i) {
    trip.push_back({i, i + 1, 1});
    trip.push_back({i + 1, i, -1});
  }
  for (index_t i = 2; i < n; ++i) trip.push_back({i, i, 4});
  const auto A = from_triplets<double>(n, n, trip);
  std::vector<double> b(n, 0.0);
  b[0] = 1.0;
  const std::vector<cplx> shifts{0.0, -5.0};
  SolverConfig cfg;
  cfg.restart = 2;
  const auto res = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  CHECK(res.report.all_converged());
  CHECK(res.report.shifts[0].skipped_cycles >= 1);
  CHECK(res.report.shifts[0].desynchronized);
  CHECK_FALSE(res.report.shifts[1].desynchronized);
  CHECK(res.report.recovery_mvps > 0);
  for (std::size_t i = 0; i < shifts.size(); ++i)
    CHECK(testing::rel_diff(res.solutions[i], testing::dense_shifted_solve(A, shifts[i], std::span<const double>(b))) <=
          1e-7);
}

TEST_CASE("every shift singular in every cycle raises AllShiftsStalled") {
  const auto A = from_triplets<double>(2, 2, {{0, 1, 1}, {1, 0, 1}});
  const std::vector<double> b{1, 0};
  const std::vector<cplx> shifts{0.0};
  SolverConfig cfg;
  cfg.restart = 1;
  CHECK_THROWS_AS(solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg),
                  AllShiftsStalled);
}

TEST_CASE("solver input validation") {
  SolverConfig cfg;
  const auto A = CsrMatrix<double>::identity(3);
  const std::vector<double> b(3, 1.0), zero(3, 0.0), short_b(2, 1.0);
  const std::vector<cplx> shifts{0.0};
  CHECK_THROWS_AS(solve_shifted_hessen(A, std::span<const double>(short_b), std::span<const cplx>(shifts), cfg),
                  DimensionMismatch);
  CHECK_THROWS_AS(solve_shifted_hessen(A, std::span<const double>(zero), std::span<const cplx>(shifts), cfg),
                  ZeroStartVector);
  CHECK_THROWS_AS(solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(), cfg), ConfigError);
  cfg.restart = 0;
  CHECK_THROWS_AS(solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg), ConfigError);
  cfg.restart = 5;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(solve_hessen(A, std::span<const double>(b), {}, cfg), ConfigError);
}

TEST_CASE("budget exhaustion leaves shifts unconverged") {
  const auto A = gen_convdiff3d(6, 1.0, {0, 20, 40}, 0.0);
  const std::vector<double> b(static_cast<std::size_t>(A.rows()), 1.0);
  const auto shifts = gen_shifts(ShiftSpec::arithmetic(1e-3, 3));
  SolverConfig cfg;
  cfg.tol = 1e-30;
  cfg.max_mvps = 40;
  cfg.restart = 10;
  const auto res = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  CHECK_FALSE(res.report.all_converged());
  CHECK(res.report.converged_count() == 0);
  CHECK(res.report.mvps <= cfg.max_mvps + static_cast<std::int64_t>(cfg.restart));
}

TEST_CASE("absorb_seed_shift translates the family") {
  const auto A = CsrMatrix<double>::identity(2);
  const std::vector<cplx> shifts{-1.0, -2.0, {0.0, 3.0}};
  const auto seeded = absorb_seed_shift(A, std::span<const cplx>(shifts), 1);
  const auto complex_seed = absorb_seed_shift(CsrMatrix<cplx>::identity(2), std::span<const cplx>(shifts), 2);
  CHECK(complex_seed.matrix.coeff(0, 0) == cplx(1.0, -3.0));
  CHECK(seeded.matrix.coeff(0, 0) == 3.0);
  CHECK(seeded.shifts[0] == cplx(1.0));
  CHECK(seeded.shifts[1] == cplx(0.0));
  CHECK(seeded.shifts[2] == cplx(2.0, 3.0));
  CHECK_THROWS_AS(absorb_seed_shift(A, std::span<const cplx>(shifts), 3), ConfigError);
  CHECK_THROWS_AS(absorb_seed_shift(A, std::span<const cplx>(shifts), 2), ConfigError);

  // Same solutions either way.
  testing::Rng rng(8);
  const auto B = testing::random_sparse<double>(rng, 80, 0.05, 5.0);
  const auto b = rng.vector<double>(80);
  SolverConfig cfg;
  cfg.restart = 15;
  const auto s2 = absorb_seed_shift(B, std::span<const cplx>(shifts), 1);
  const auto direct = solve_shifted_hessen(B, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  const auto via_seed =
      solve_shifted_hessen(s2.matrix, std::span<const double>(b), std::span<const cplx>(s2.shifts), cfg);
  REQUIRE(direct.report.all_converged());
  REQUIRE(via_seed.report.all_converged());
  for (std::size_t i = 0; i < shifts.size(); ++i)
    CHECK(testing::rel_diff(via_seed.solutions[i], direct.solutions[i]) <= 1e-6);
}

TEST_CASE("residuals stay collinear with the next basis vector", "[property]") {
  testing::Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = rng.index(60, 200);
    // Weak diagonal and short restarts so that several cycles run.
    const auto A = testing::random_sparse<double>(rng, n, 0.02, rng.uniform(1.5, 2.5));
    const auto b = rng.vector<double>(n);
    std::vector<cplx> shifts;
    for (int j = 0; j < 4; ++j) shifts.push_back({rng.uniform(-1, 0), rng.uniform(-0.5, 0.5)});
    SolverConfig cfg;
    cfg.restart = static_cast<std::size_t>(rng.index(4, 10));
    double worst = 0.0;
    std::size_t checked = 0;
    CycleObserver<double> observer = [&](const CycleSnapshot<double>& snap) {
      if (snap.next_basis_vector.empty()) return;
      for (std::size_t i = 0; i < snap.family.shifts.size(); ++i) {
        if (!snap.family.active[i] || snap.desynchronized[i]) continue;
        const auto r =
            testing::shifted_residual(A, snap.family.shifts[i], snap.solutions[i], std::span<const double>(b));
        if (norm2(r) > 1e-6 * norm2(b)) {
          worst = std::max(worst, testing::sin_angle(r, snap.next_basis_vector));
          ++checked;
        }
      }
    };
    solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg, observer);
    INFO("trial " << trial << " n=" << n << " m=" << cfg.restart);
    CHECK(checked > 0);
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("MVP accounting is independent of the number of shifts", "[property]") {
  testing::Rng rng(555);
  for (int trial = 0; trial < 8; ++trial) {
    const auto n = rng.index(80, 200);
    const auto A = testing::random_sparse<double>(rng, n, 0.02, 5.0);
    const auto b = rng.vector<double>(n);
    SolverConfig cfg;
    cfg.restart = 10;
    std::vector<cplx> shifts{0.0};
    const auto one = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
    for (int j = 1; j < 6; ++j) shifts.push_back(-0.01 * j);
    const auto six = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
    for (const auto* r : {&one, &six}) {
      CHECK(r->report.basis_mvps == static_cast<std::int64_t>(r->report.cycles * cfg.restart));
      CHECK(r->report.mvps == r->report.basis_mvps + r->report.confirmation_mvps + r->report.recovery_mvps);
      CHECK(r->report.confirmation_mvps <= static_cast<std::int64_t>(r->report.cycles * r->report.shifts.size()));
    }
    // Shifts this close need at most the cycles of the hardest one.
    CHECK(six.report.cycles >= one.report.cycles);
    CHECK(six.report.cycles <= one.report.cycles + 2);
  }
}

TEST_CASE("one zero shift reproduces solve_hessen", "[property]") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = rng.index(50, 150);
    const auto A = testing::random_sparse<double>(rng, n, 0.03, 4.0);
    const auto b = rng.vector<double>(n);
    SolverConfig cfg;
    cfg.restart = 8;
    const std::vector<cplx> zero{0.0};
    const auto s = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(zero), cfg);
    const auto h = solve_hessen(A, std::span<const double>(b), {}, cfg);
    CHECK(testing::rel_diff(s.solutions[0], h.x) <= 1e-12);
    const auto& es = s.report.shifts[0].estimates;
    const auto& eh = h.report.shifts[0].estimates;
    REQUIRE(es.size() == eh.size());
    for (std::size_t c = 0; c < es.size(); ++c) CHECK_THAT(es[c], WithinRel(eh[c], 1e-8));
  }
}

TEST_CASE("estimate matches the true residual at the end of every cycle", "[property]") {
  testing::Rng rng(9);
  const auto A = laplace_like(150, 3.0);
  const auto b = rng.vector<double>(150);
  const std::vector<cplx> shifts{0.0, -0.3, {0.1, 0.4}};
  SolverConfig cfg;
  cfg.restart = 6;
  std::vector<double> ratios;
  CycleObserver<double> observer = [&](const CycleSnapshot<double>& snap) {
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      if (!snap.family.active[i] || snap.desynchronized[i] || snap.next_basis_vector.empty()) continue;
      const double truth = true_relative_residual(A, shifts[i], std::span<const cplx>(snap.solutions[i]),
                                                  std::span<const double>(b));
      if (truth <= 1e-12) continue;
      const double est = std::abs(snap.family.beta[i]) * norm2(snap.next_basis_vector) / norm2(b);
      ratios.push_back(std::abs(est - truth) / truth);
    }
  };
  const auto res = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg, observer);
  CHECK(res.report.all_converged());
  REQUIRE_FALSE(ratios.empty());
  CHECK(*std::max_element(ratios.begin(), ratios.end()) <= 1e-6);
}

TEST_CASE("attach_costs fills the estimate from the report") {
  testing::Rng rng(6);
  const auto A = testing::random_sparse<double>(rng, 100, 0.03, 5.0);
  const auto b = rng.vector<double>(100);
  const std::vector<cplx> shifts{0.0, -0.1};
  SolverConfig cfg;
  cfg.restart = 10;
  const auto res = solve_shifted_hessen(A, std::span<const double>(b), std::span<const cplx>(shifts), cfg);
  const auto rep = attach_costs(res.report, CostProcess::Hessenberg, A.rows(), A.nnz());
  REQUIRE(rep.cost);
  CHECK(rep.cost->cycles == static_cast<std::int64_t>(res.report.cycles));
  CHECK(rep.cost->total == rep.cost->cycles * (predicted_flops(CostProcess::Hessenberg, 10, 100, A.nnz()) + 2 * 100));
}
