#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "shiftkrylov/csr_matrix.hpp"
#include "shiftkrylov/shifted_solvers.hpp"

namespace shiftkrylov {

enum class RuleKind { Exp, MittagLeffler };

/// f(-x) ~ sum_j w_j / (z_j + x): exp(-x), or E_gamma(-x) for Mittag-Leffler.
struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  RuleKind kind = RuleKind::Exp;
  double gamma = 1.0;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Every (z, w) has a partner (conj z, conj w), real pairs counting as
  /// their own partner.
  bool conjugate_symmetric() const;
};

/// Checks sizes, finiteness and distinct nodes; throws ParseError or
/// DuplicateNodes.
void validate(const QuadratureRule& rule);

/// CSV with header `re_z,im_z,re_w,im_w`. Lines starting with '#' are
/// comments; `# kind: exp` or `# kind: mittag_leffler gamma=0.8` sets the tag.
QuadratureRule read_quadrature(std::istream& in, const std::string& source = "<stream>");
QuadratureRule load_quadrature(const std::filesystem::path& path);

struct MatfuncResult {
  std::vector<cplx> value;
  /// Imaginary parts were dropped (real data, conjugate-symmetric rule).
  bool real_part = false;
  SolveReport report;
};

/// sum_j w_j (z_j I + A)^{-1} u0 from one shifted family with sigma_j = -z_j.
/// Throws NotConverged naming the nodes that missed the tolerance.
template <Scalar T>
MatfuncResult eval_rational_action(const CsrMatrix<T>& A, std::span<const T> u0, const QuadratureRule& rule,
                                   const SolverConfig& cfg);

/// E_gamma(z) = sum_k z^k / Gamma(gamma k + 1) for 0 < gamma <= 1.
cplx mittag_leffler(double gamma, cplx z);

/// lambda -> f(-lambda) for the function the rule approximates.
std::function<cplx(cplx)> rule_function(const QuadratureRule& rule);

/// V f(Lambda) V^{-1} u0 from a dense eigendecomposition. n <= 500; throws
/// IllConditionedEigenbasis when cond(V) > 1e8.
template <Scalar T>
std::vector<cplx> dense_matfunc_oracle(const CsrMatrix<T>& A, std::span<const T> u0,
                                       const std::function<cplx(cplx)>& f);

}  // namespace shiftkrylov
