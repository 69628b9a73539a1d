#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "shiftkrylov/error.hpp"
#include "shiftkrylov/matfunc.hpp"

namespace shiftkrylov {

namespace {

constexpr double pi = boost::math::constants::pi<double>();

// Compensated series sum_k z^k / Gamma(gamma k + 1); callers keep |z| small
// enough that the terms do not cancel.
cplx ml_series(double gamma, cplx z) {
  cplx sum{1.0}, comp{};
  cplx zk{1.0};
  for (int k = 1; k < 500; ++k) {
    zk *= z;
    const cplx term = zk / std::tgamma(gamma * k + 1.0);
    const cplx yv = term - comp;
    const cplx t = sum + yv;
    comp = (t - sum) - yv;
    sum = t;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// exp(z) from the series at z / 2^k followed by k squarings.
cplx exp_by_squaring(cplx z) {
  int k = 0;
  while (std::abs(z) > 0.5) {
    z /= 2.0;
    ++k;
  }
  cplx e = ml_series(1.0, z);
  for (int i = 0; i < k; ++i) e *= e;
  return e;
}

// Series in 100-digit arithmetic for arguments next to the rays
// |arg z| = gamma pi, where the integral below has a pole on its path.
cplx ml_series_wide(double gamma, cplx z) {
  using mp = boost::multiprecision::cpp_bin_float_100;
  const mp zr = z.real(), zi = z.imag();
  mp sr = 1, si = 0, pr = 1, pi_ = 0;
  const double growth = std::pow(std::abs(z), 1.0 / gamma);
  for (int k = 1; k < 4000; ++k) {
    const mp nr = pr * zr - pi_ * zi;
    pi_ = pr * zi + pi_ * zr;
    pr = nr;
    const mp g = boost::math::tgamma(mp(gamma) * k + 1);
    const mp tr = pr / g, ti = pi_ / g;
    sr += tr;
    si += ti;
    if (k > 2.0 * growth + 10 && abs(tr) + abs(ti) < mp(1e-40) * (abs(sr) + abs(si))) break;
  }
  return {sr.convert_to<double>(), si.convert_to<double>()};
}

// -sum_k z^-k / Gamma(1 - gamma k), stopped at the smallest term. Used near
// the rays when |z|^(1/gamma) is large, where the exponential part is below
// double precision.
cplx ml_asymptotic(double gamma, cplx z) {
  cplx sum{}, zk{1.0};
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 400; ++k) {
    zk /= z;
    const double x = 1.0 - gamma * k;
    if (x <= 0.0 && std::abs(x - std::round(x)) < 1e-12) continue;
    const cplx term = zk / std::tgamma(x);
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    sum -= term;
    if (mag <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// E_gamma(z) = (1/gamma) exp(z^(1/gamma)) [|arg z| < gamma pi]
//   + (1/pi) int_0^inf e^{-r} r^(gamma-1) (-z) sin(gamma pi)
//                 / (r^(2 gamma) - 2 z r^gamma cos(gamma pi) + z^2) dr.
cplx ml_integral(double gamma, cplx z) {
  const double sg = std::sin(gamma * pi), cg = std::cos(gamma * pi);
  auto kernel = [&](double r) {
    const double rg = std::pow(r, gamma);
    return std::exp(-r) * std::pow(r, gamma - 1.0) * (-z) * sg / (pi * (rg * rg - 2.0 * z * rg * cg + z * z));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double re = integrator.integrate([&](double r) { return kernel(r).real(); }, 1e-14);
  const double im = integrator.integrate([&](double r) { return kernel(r).imag(); }, 1e-14);
  cplx out(re, im);
  if (std::abs(std::arg(z)) < gamma * pi) out += std::exp(std::pow(z, 1.0 / gamma)) / gamma;
  return out;
}

}  // namespace

cplx mittag_leffler(double gamma, cplx z) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConfigError("mittag_leffler: gamma must lie in (0, 1], got " + std::to_string(gamma));
  if (!is_finite(z)) throw ConfigError("mittag_leffler: argument is not finite");
  if (z == cplx{}) return 1.0;
  if (gamma == 1.0) return exp_by_squaring(z);
  if (std::abs(z) <= 1.0) return ml_series(gamma, z);
  if (std::abs(std::abs(std::arg(z)) - gamma * pi) < 0.05)
    return std::pow(std::abs(z), 1.0 / gamma) < 150.0 ? ml_series_wide(gamma, z) : ml_asymptotic(gamma, z);
  return ml_integral(gamma, z);
}

std::function<cplx(cplx)> rule_function(const QuadratureRule& rule) {
  if (rule.kind == RuleKind::Exp) return [](cplx lambda) { return std::exp(-lambda); };
  const double gamma = rule.gamma;
  return [gamma](cplx lambda) { return mittag_leffler(gamma, -lambda); };
}

}  // namespace shiftkrylov
