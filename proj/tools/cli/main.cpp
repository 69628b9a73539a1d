#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace shiftkrylov::cli;

namespace {

void add_generator_options(CLI::App* sub, GenOptions& opt, std::string& beta) {
  sub->add_option("--n", opt.spec.n, "Interior grid points per axis")->required();
  sub->add_option("-o,--output", opt.output, "Matrix Market output path")->required();
  sub->add_option("--u0", opt.u0_output, "Also write the initial-condition vector here");
  if (opt.spec.kind == "convdiff3d") {
    sub->add_option("--eps", opt.spec.eps, "Diffusion coefficient")->capture_default_str();
    sub->add_option("--beta", beta, "Convection vector bx,by,bz")->capture_default_str();
    sub->add_option("--r", opt.spec.r, "Reaction coefficient")->capture_default_str();
  } else {
    sub->add_option("--scale", opt.spec.scale, "Operator scale factor")->capture_default_str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shifted Krylov solvers: restarted shifted Hessenberg and FOM, matrix-function actions"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a test operator as a Matrix Market file");
  gen->require_subcommand(1);
  GenOptions cd_opt, l2_opt, l1_opt;
  cd_opt.spec.kind = "convdiff3d";
  l2_opt.spec.kind = "laplace2d";
  l1_opt.spec.kind = "laplace1d";
  std::string cd_beta = "0,0,0", unused_beta;
  auto* gen_cd = gen->add_subcommand("convdiff3d", "3D convection-diffusion-reaction operator (7-point)");
  add_generator_options(gen_cd, cd_opt, cd_beta);
  auto* gen_l2 = gen->add_subcommand("laplace2d", "2D Laplacian (5-point), scaled");
  add_generator_options(gen_l2, l2_opt, unused_beta);
  auto* gen_l1 = gen->add_subcommand("laplace1d", "1D Laplacian (3-point), scaled");
  add_generator_options(gen_l1, l1_opt, unused_beta);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one shifted family (A - sigma_i I) x = b");
  SolveOptions sopt;
  std::string solve_format = "markdown";
  std::size_t seed_shift = 0;
  solve->add_option("matrix", sopt.matrix, "Matrix Market file")->required();
  solve->add_option("--shifts", sopt.shifts, "arithmetic:C:NU | list:S1,S2,... | qcd")->capture_default_str();
  solve->add_option("--solver", sopt.solver, "shessen | sfom | hessen")->capture_default_str();
  solve->add_option("-m,--restart", sopt.m, "Krylov dimension per cycle")->capture_default_str();
  solve->add_option("--tol", sopt.tol, "Relative residual tolerance")->capture_default_str();
  solve->add_option("--max-mvps", sopt.max_mvps, "Budget of matrix-vector products")->capture_default_str();
  solve->add_option("--rhs", sopt.rhs, "ones | random:SEED | vector file")->capture_default_str();
  auto* seed_opt = solve->add_option("--seed-shift", seed_shift, "Index of the shift absorbed into A");
  solve->add_option("--format", solve_format, "csv | markdown")->capture_default_str();
  solve->add_option("-o,--output", sopt.output, "Write the report here instead of stdout");
  solve->add_option("--solution", sopt.solution_output, "Write the solutions (one column per shift)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a solver comparison from a config file");
  std::string bench_config, bench_format, bench_output;
  bool parallel = false;
  bench->add_option("config", bench_config, "Config file (key = value, [problem NAME] sections)")->required();
  bench->add_flag("--parallel", parallel, "Run distinct problems on separate threads");
  bench->add_option("--format", bench_format, "csv | markdown (overrides the config)");
  bench->add_option("-o,--output", bench_output, "Write the report here instead of stdout");

  // matfunc
  auto* matfunc = app.add_subcommand("matfunc", "Evaluate f(A) u0 from a rational quadrature rule");
  MatfuncOptions mopt;
  std::string oracle;
  matfunc->add_option("matrix", mopt.matrix, "Matrix Market file")->required();
  matfunc->add_option("--rule", mopt.rule, "Quadrature CSV (re_z,im_z,re_w,im_w)")->required();
  matfunc->add_option("--u0", mopt.u0, "ones | random:SEED | vector file")->capture_default_str();
  matfunc->add_option("--oracle", oracle, "dense: compare with a dense eigendecomposition (n <= 500)")
      ->check(CLI::IsMember({"dense"}));
  matfunc->add_option("-m,--restart", mopt.m, "Krylov dimension per cycle")->capture_default_str();
  matfunc->add_option("--tol", mopt.tol, "Relative residual tolerance per node")->capture_default_str();
  matfunc->add_option("--max-mvps", mopt.max_mvps, "Budget of matrix-vector products")->capture_default_str();
  matfunc->add_option("-o,--output", mopt.output, "Write f(A) u0 here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (gen->parsed()) {
      GenOptions* opt = gen_cd->parsed() ? &cd_opt : gen_l2->parsed() ? &l2_opt : &l1_opt;
      if (gen_cd->parsed()) cd_opt.spec.beta = parse_generator("convdiff3d beta=" + cd_beta).beta;
      return cmd_gen(*opt, std::cout);
    }
    if (solve->parsed()) {
      sopt.format = parse_format(solve_format);
      if (seed_opt->count() > 0) sopt.seed_shift = seed_shift;
      return cmd_solve(sopt, std::cout);
    }
    if (bench->parsed()) {
      std::optional<Format> fmt;
      if (!bench_format.empty()) fmt = parse_format(bench_format);
      return cmd_bench(bench_config, parallel, fmt, bench_output, std::cout);
    }
    if (matfunc->parsed()) {
      mopt.dense_oracle = oracle == "dense";
      return cmd_matfunc(mopt, std::cout);
    }
  } catch (...) {
    return report_failure(std::cerr);
  }
  return usage_error;
}
