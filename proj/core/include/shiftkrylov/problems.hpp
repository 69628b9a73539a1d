#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "shiftkrylov/csr_matrix.hpp"

namespace shiftkrylov {

/// -eps * Laplacian + beta . grad - r I on the unit cube: 7-point stencil,
/// h = 1/(n+1), Dirichlet boundaries, central first differences, x index
/// fastest. The semi-discrete system is du/dt = -A u. Throws InvalidGrid for
/// n < 2 or eps <= 0.
CsrMatrix<double> gen_convdiff3d(index_t n, double eps, const std::array<double, 3>& beta, double r);

/// scale * (-Laplacian), 5-point stencil on the unit square, Dirichlet.
CsrMatrix<double> gen_laplace2d(index_t n, double scale);

/// scale * (-u''), 3-point stencil on (0, 1), Dirichlet.
CsrMatrix<double> gen_laplace1d(index_t n, double scale);

/// x(1-x) y(1-y) z(1-z) at the interior grid points of gen_convdiff3d.
std::vector<double> convdiff3d_initial(index_t n);
/// sin(pi x) sin(pi y) on the gen_laplace2d grid.
std::vector<double> laplace2d_initial(index_t n);
/// sin(pi x) on the gen_laplace1d grid.
std::vector<double> laplace1d_initial(index_t n);

struct ShiftSpec {
  enum class Pattern { Arithmetic, Explicit };
  Pattern pattern = Pattern::Arithmetic;
  /// sigma_j = -step * j, j = 1..count.
  double step = 0.0;
  std::size_t count = 0;
  std::vector<cplx> values;

  static ShiftSpec arithmetic(double step, std::size_t count) { return {Pattern::Arithmetic, step, count, {}}; }
  static ShiftSpec list(std::vector<cplx> values) { return {Pattern::Explicit, 0.0, values.size(), std::move(values)}; }
};

/// Throws ConfigError for an empty family.
std::vector<cplx> gen_shifts(const ShiftSpec& spec);

/// The twelve shifts -{.001, ..., .006, .01, ..., .06}.
ShiftSpec qcd_shift_set();

}  // namespace shiftkrylov
