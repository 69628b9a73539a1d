#include <catch_amalgamated.hpp>

#include <filesystem>
#include <numbers>
#include <sstream>

#include <shiftkrylov/error.hpp>
#include <shiftkrylov/matfunc.hpp>
#include <shiftkrylov/problems.hpp>

#include "test_support.hpp"

using namespace shiftkrylov;
using Catch::Matchers::WithinAbs;

namespace {

const std::filesystem::path data_dir = SHIFTKRYLOV_DATA_DIR;

QuadratureRule parse(const std::string& text) {
  std::istringstream in(text);
  return read_quadrature(in);
}

CsrMatrix<double> diagonal(const std::vector<double>& d) {
  std::vector<Triplet<double>> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({index_t(i), index_t(i), d[i]});
  return from_triplets<double>(index_t(d.size()), index_t(d.size()), t);
}

struct MlCase {
  double gamma;
  cplx z;
  cplx value;
};

// 50-digit mpmath evaluations of the defining series / integral form.
const MlCase ml_table[] = {
    {0.6, {-5, 0}, {0.09511784643875462, 0}},
    {0.6, {-30, 0}, {0.015211431482801457, 0}},
    {0.8, {-30, 0}, {0.0075758607992192087, 0}},
    {0.9, {-200, 0}, {0.00052997543888320914, 0}},
    {0.8, {-3, 4}, {0.018310212969634306, 0.046201691076563344}},
    {0.9, {-2, 7}, {-0.0022121593183086533, 0.030719912695737951}},
    {0.6, {-40, 10}, {0.010694874367196473, 0.0026976857884721578}},
    {0.8, {-4.0450849718747375, 2.9389262614623651}, {0.037586390095728612, 0.039737291455478368}},
    {0.6, {-6.1803398874989472, 19.021130325903072}, {0.0066350703726115325, 0.021705456026493723}},
    {0.9, {-95.105651629515359, -30.901699437494736}, {0.0010140259064805428, -0.00033539483850259214}},
    {0.5, {5, 0}, {144009798674.66104, 0}},
    {0.7, {0.5, 0.2}, {1.7478875129953443, 0.46793646558527401}},
    {0.9, {3, 1}, {9.8984829387348779, 30.638333295645804}},
    {0.6, {2, -9}, {-0.012607625625988832, -0.047012803599238438}},
};

}  // namespace

TEST_CASE("read_quadrature examples") {
  const auto one = parse("re_z,im_z,re_w,im_w\n1,0,1,0\n");
  CHECK(one.size() == 1);
  CHECK(one.nodes[0] == cplx(1, 0));
  CHECK(one.weights[0] == cplx(1, 0));
  CHECK(one.kind == RuleKind::Exp);

  const auto tagged = parse("# kind: mittag_leffler gamma=0.8\nre_z,im_z,re_w,im_w\n1,2,3,4\n1,-2,3,-4\n");
  CHECK(tagged.kind == RuleKind::MittagLeffler);
  CHECK(tagged.gamma == 0.8);
  CHECK(tagged.conjugate_symmetric());
  CHECK_FALSE(parse("re_z,im_z,re_w,im_w\n1,2,3,4\n").conjugate_symmetric());
}

TEST_CASE("read_quadrature errors") {
  CHECK_THROWS_AS(parse("re_z,im_z,re_w,im_w\n"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1,0,1,0\n"), ParseError);
  CHECK_THROWS_AS(parse("re_z,im_z,re_w,im_w\n1,0,1\n"), ParseError);
  CHECK_THROWS_AS(parse("re_z,im_z,re_w,im_w\n1,0,x,0\n"), ParseError);
  CHECK_THROWS_AS(parse("re_z,im_z,re_w,im_w\n1,0,1,0\n1,0,2,0\n"), DuplicateNodes);
  CHECK_THROWS_AS(load_quadrature(data_dir / "quadrature" / "missing.csv"), ParseError);
}

TEST_CASE("shipped rules load") {
  const auto e = load_quadrature(data_dir / "quadrature" / "exp16.csv");
  CHECK(e.size() == 16);
  CHECK(e.kind == RuleKind::Exp);
  CHECK(e.conjugate_symmetric());
  for (double g : {0.6, 0.8, 0.9}) {
    std::ostringstream name;
    name << "ml16_g" << g << ".csv";
    const auto r = load_quadrature(data_dir / "quadrature" / name.str());
    CHECK(r.size() == 16);
    CHECK(r.kind == RuleKind::MittagLeffler);
    CHECK(r.gamma == g);
  }
}

TEST_CASE("shipped rules approximate their scalar functions on the positive axis") {
  for (const char* file : {"exp16.csv", "ml16_g0.6.csv", "ml16_g0.8.csv", "ml16_g0.9.csv"}) {
    const auto rule = load_quadrature(data_dir / "quadrature" / file);
    const auto f = rule_function(rule);
    double worst = 0.0;
    for (double x : {0.0, 0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0, 1e4}) {
      cplx approx{};
      for (std::size_t j = 0; j < rule.size(); ++j) approx += rule.weights[j] / (rule.nodes[j] + x);
      worst = std::max(worst, std::abs(approx - f(x)));
    }
    INFO(file);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("eval_rational_action examples") {
  SolverConfig cfg;
  cfg.tol = 1e-12;
  SECTION("A = 0") {
    const auto Z = from_triplets<double>(2, 2, std::vector<Triplet<double>>{});
    const std::vector<double> u0{1, 1};
    const auto res = eval_rational_action(Z, std::span<const double>(u0), parse("re_z,im_z,re_w,im_w\n1,0,1,0\n"), cfg);
    for (const auto& v : res.value) CHECK(std::abs(v - 1.0) <= 1e-15);
  }
  SECTION("diag(1, 2)") {
    const std::vector<double> u0{1, 1};
    const auto res = eval_rational_action(diagonal({1, 2}), std::span<const double>(u0),
                                          parse("re_z,im_z,re_w,im_w\n1,0,2,0\n"), cfg);
    CHECK(std::abs(res.value[0] - 1.0) <= 1e-14);
    CHECK(std::abs(res.value[1] - 2.0 / 3.0) <= 1e-14);
    CHECK(res.real_part);
  }
  SECTION("complex input keeps the complex sum") {
    const std::vector<cplx> u0{{1, 1}, {0, 2}};
    const auto D = from_triplets<cplx>(2, 2, {{0, 0, 1.0}, {1, 1, 2.0}});
    const auto res = eval_rational_action(D, std::span<const cplx>(u0), parse("re_z,im_z,re_w,im_w\n1,1,1,0\n"), cfg);
    CHECK_FALSE(res.real_part);
    CHECK(std::abs(res.value[0] - u0[0] / cplx(2, 1)) <= 1e-14);
    CHECK(std::abs(res.value[1] - u0[1] / cplx(3, 1)) <= 1e-14);
  }
  SECTION("zero start vector") {
    const std::vector<double> u0{0, 0};
    CHECK_THROWS_AS(eval_rational_action(diagonal({1, 2}), std::span<const double>(u0),
                                         parse("re_z,im_z,re_w,im_w\n1,0,1,0\n"), cfg),
                    ZeroStartVector);
  }
  SECTION("budget too small reports the failing nodes") {
    const auto A = gen_laplace1d(60, 1.0);
    testing::Rng rng(1);
    const auto u0 = rng.vector<double>(60);
    cfg.max_mvps = 5;
    cfg.restart = 5;
    try {
      eval_rational_action(A, std::span<const double>(u0), load_quadrature(data_dir / "quadrature" / "exp16.csv"),
                           cfg);
      FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
      CHECK_FALSE(e.nodes().empty());
      CHECK(e.nodes().front() < 16);
      CHECK(e.nodes().back() <= 16);
    }
  }
}

TEST_CASE("rational action is linear in u0", "[property]") {
  const auto rule = load_quadrature(data_dir / "quadrature" / "exp16.csv");
  const auto A = gen_laplace1d(50, 1.0 / (std::numbers::pi * std::numbers::pi));
  testing::Rng rng(10);
  SolverConfig cfg;
  cfg.tol = 1e-13;
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = rng.vector<double>(50);
    const double alpha = rng.uniform(-10, 10);
    std::vector<double> au(u);
    for (auto& v : au) v *= alpha;
    const auto base = eval_rational_action(A, std::span<const double>(u), rule, cfg);
    const auto scaled = eval_rational_action(A, std::span<const double>(au), rule, cfg);
    std::vector<cplx> expect(base.value);
    for (auto& v : expect) v *= alpha;
    CHECK(testing::rel_diff(scaled.value, expect) <= 1e-12);
  }
}

TEST_CASE("gamma = 1 tag leaves the action bit-identical") {
  auto rule = load_quadrature(data_dir / "quadrature" / "exp16.csv");
  const auto A = gen_laplace1d(40, 0.1);
  const auto u0 = laplace1d_initial(40);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  const auto e = eval_rational_action(A, std::span<const double>(u0), rule, cfg);
  rule.kind = RuleKind::MittagLeffler;
  rule.gamma = 1.0;
  const auto m = eval_rational_action(A, std::span<const double>(u0), rule, cfg);
  CHECK(e.value == m.value);
  CHECK(e.report.mvps == m.report.mvps);
}

TEST_CASE("mittag_leffler against high-precision references") {
  for (const auto& c : ml_table) {
    const cplx v = mittag_leffler(c.gamma, c.z);
    INFO("gamma " << c.gamma << " z " << c.z << " got " << v << " want " << c.value);
    CHECK(std::abs(v - c.value) <= 1e-10 * std::max(1.0, std::abs(c.value)));
  }
}

TEST_CASE("mittag_leffler special cases") {
  CHECK(mittag_leffler(0.7, 0.0) == cplx(1.0));
  for (double x : {-300.0, -20.0, -1.0, -1e-3, 0.3, 2.0, 25.0}) {
    const cplx z(x, 0.5 * x);
    CHECK(std::abs(mittag_leffler(1.0, z) - std::exp(z)) <= 1e-12 * std::abs(std::exp(z)) + 1e-300);
  }
  // E_{1/2}(z) = exp(z^2) erfc(-z) for real z.
  for (double x : {-4.0, -1.5, -0.2, 0.8, 2.5}) {
    const double ref = std::exp(x * x) * std::erfc(-x);
    CHECK(std::abs(mittag_leffler(0.5, x) - ref) <= 1e-10 * ref);
  }
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(mittag_leffler(1.5, 1.0), ConfigError);
  CHECK_THROWS_AS(mittag_leffler(0.5, cplx(std::nan(""), 0)), ConfigError);
}

TEST_CASE("mittag_leffler is conjugate symmetric", "[property]") {
  testing::Rng rng(88);
  for (int trial = 0; trial < 60; ++trial) {
    const double g = rng.uniform(0.3, 1.0);
    const cplx z(rng.uniform(-60, 5), rng.uniform(-30, 30));
    const cplx a = mittag_leffler(g, z), b = mittag_leffler(g, std::conj(z));
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("dense_matfunc_oracle examples") {
  const auto expf = [](cplx z) { return std::exp(z); };
  const std::vector<double> u0{3, -1};
  const auto r0 = dense_matfunc_oracle(from_triplets<double>(2, 2, std::vector<Triplet<double>>{}), std::span<const double>(u0), expf);
  CHECK(std::abs(r0[0] - 3.0) <= 1e-15);
  CHECK(std::abs(r0[1] + 1.0) <= 1e-15);

  const std::vector<double> one{1};
  const auto r1 = dense_matfunc_oracle(diagonal({std::log(2.0)}), std::span<const double>(one), expf);
  CHECK(std::abs(r1[0] - 2.0) <= 1e-15);

  const auto D = diagonal({-0.5, -2.0, -7.0});
  const std::vector<double> u{1, 2, 3};
  const auto ml1 = [](cplx z) { return mittag_leffler(1.0, z); };
  const auto a = dense_matfunc_oracle(D, std::span<const double>(u), expf);
  const auto b = dense_matfunc_oracle(D, std::span<const double>(u), ml1);
  CHECK(testing::rel_diff(b, a) <= 1e-12);
}

TEST_CASE("dense_matfunc_oracle refusals") {
  const auto expf = [](cplx z) { return std::exp(z); };
  // Jordan block: eigenvectors are numerically parallel.
  const auto J = from_triplets<double>(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}});
  const std::vector<double> u{1, 1};
  CHECK_THROWS_AS(dense_matfunc_oracle(J, std::span<const double>(u), expf), IllConditionedEigenbasis);
  const auto big = CsrMatrix<double>::identity(501);
  const std::vector<double> v(501, 1.0);
  CHECK_THROWS_AS(dense_matfunc_oracle(big, std::span<const double>(v), expf), InvalidDimensions);
}

TEST_CASE("exp action on the 1D Laplacian matches the dense oracle") {
  const auto rule = load_quadrature(data_dir / "quadrature" / "exp16.csv");
  const auto A = gen_laplace1d(100, 1.0 / (std::numbers::pi * std::numbers::pi));
  testing::Rng rng(12);
  const auto u0 = rng.vector<double>(100);
  SolverConfig cfg;
  cfg.tol = 1e-10;
  const auto res = eval_rational_action(A, std::span<const double>(u0), rule, cfg);
  const auto ref = dense_matfunc_oracle(A, std::span<const double>(u0), rule_function(rule));
  CHECK(testing::rel_diff(res.value, ref) <= 1e-6);
}
