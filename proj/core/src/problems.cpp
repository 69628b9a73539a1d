#include "shiftkrylov/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "shiftkrylov/error.hpp"

namespace shiftkrylov {

namespace {

void check_grid(const char* who, index_t n, index_t min_n) {
  if (n < min_n)
    throw InvalidGrid(std::string(who) + ": need at least " + std::to_string(min_n) + " points per axis, got " +
                      std::to_string(n));
}

double grid_point(index_t i, index_t n) { return static_cast<double>(i + 1) / static_cast<double>(n + 1); }

}  // namespace

CsrMatrix<double> gen_convdiff3d(index_t n, double eps, const std::array<double, 3>& beta, double r) {
  check_grid("gen_convdiff3d", n, 2);
  if (!(eps > 0.0)) throw InvalidGrid("gen_convdiff3d: eps must be positive");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double diff = eps / (h * h);
  const index_t N = n * n * n;
  const index_t stride[3] = {1, n, n * n};

  std::vector<Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(7 * N));
  for (index_t k = 0; k < n; ++k)
    for (index_t j = 0; j < n; ++j)
      for (index_t i = 0; i < n; ++i) {
        const index_t row = i + n * (j + n * k);
        const index_t pos[3] = {i, j, k};
        trip.push_back({row, row, 6.0 * diff - r});
        for (int d = 0; d < 3; ++d) {
          const double conv = beta[d] / (2.0 * h);
          if (pos[d] > 0) trip.push_back({row, row - stride[d], -diff - conv});
          if (pos[d] + 1 < n) trip.push_back({row, row + stride[d], -diff + conv});
        }
      }
  return from_triplets<double>(N, N, trip);
}

CsrMatrix<double> gen_laplace2d(index_t n, double scale) {
  check_grid("gen_laplace2d", n, 1);
  const double h = 1.0 / static_cast<double>(n + 1);
  const double c = scale / (h * h);
  const index_t N = n * n;
  std::vector<Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * N));
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i) {
      const index_t row = i + n * j;
      trip.push_back({row, row, 4.0 * c});
      if (i > 0) trip.push_back({row, row - 1, -c});
      if (i + 1 < n) trip.push_back({row, row + 1, -c});
      if (j > 0) trip.push_back({row, row - n, -c});
      if (j + 1 < n) trip.push_back({row, row + n, -c});
    }
  return from_triplets<double>(N, N, trip);
}

CsrMatrix<double> gen_laplace1d(index_t n, double scale) {
  check_grid("gen_laplace1d", n, 1);
  const double h = 1.0 / static_cast<double>(n + 1);
  const double c = scale / (h * h);
  std::vector<Triplet<double>> trip;
  for (index_t i = 0; i < n; ++i) {
    trip.push_back({i, i, 2.0 * c});
    if (i > 0) trip.push_back({i, i - 1, -c});
    if (i + 1 < n) trip.push_back({i, i + 1, -c});
  }
  return from_triplets<double>(n, n, trip);
}

std::vector<double> convdiff3d_initial(index_t n) {
  check_grid("convdiff3d_initial", n, 2);
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(n * n * n));
  for (index_t k = 0; k < n; ++k)
    for (index_t j = 0; j < n; ++j)
      for (index_t i = 0; i < n; ++i) {
        const double x = grid_point(i, n), y = grid_point(j, n), z = grid_point(k, n);
        u.push_back(x * (1 - x) * y * (1 - y) * z * (1 - z));
      }
  return u;
}

std::vector<double> laplace2d_initial(index_t n) {
  check_grid("laplace2d_initial", n, 1);
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(n * n));
  for (index_t j = 0; j < n; ++j)
    for (index_t i = 0; i < n; ++i)
      u.push_back(std::sin(std::numbers::pi * grid_point(i, n)) * std::sin(std::numbers::pi * grid_point(j, n)));
  return u;
}

std::vector<double> laplace1d_initial(index_t n) {
  check_grid("laplace1d_initial", n, 1);
  std::vector<double> u;
  for (index_t i = 0; i < n; ++i) u.push_back(std::sin(std::numbers::pi * grid_point(i, n)));
  return u;
}

std::vector<cplx> gen_shifts(const ShiftSpec& spec) {
  if (spec.pattern == ShiftSpec::Pattern::Explicit) {
    if (spec.values.empty()) throw ConfigError("gen_shifts: empty shift list");
    return spec.values;
  }
  if (spec.count == 0) throw ConfigError("gen_shifts: need at least one shift");
  std::vector<cplx> out(spec.count);
  for (std::size_t j = 0; j < spec.count; ++j) out[j] = -spec.step * static_cast<double>(j + 1);
  return out;
}

ShiftSpec qcd_shift_set() {
  return ShiftSpec::list({-0.001, -0.002, -0.003, -0.004, -0.005, -0.006, -0.01, -0.02, -0.03, -0.04, -0.05, -0.06});
}

}  // namespace shiftkrylov
