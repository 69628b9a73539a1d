#pragma once

// Small dense kernels for the m x m reduced systems of the Krylov solvers.

#include <span>
#include <vector>

#include "shiftkrylov/scalar.hpp"

namespace shiftkrylov {

/// Square upper-Hessenberg matrix, column-major. Entries below the first
/// subdiagonal are structurally zero and cannot be written.
template <Scalar S>
class HessMatrix {
 public:
  using value_type = S;

  explicit HessMatrix(std::size_t order);

  /// Column-major `order * order` data; throws InvalidDimensions if a
  /// nonzero lies below the subdiagonal.
  HessMatrix(std::size_t order, std::vector<S> column_major);

  static HessMatrix identity(std::size_t order);

  std::size_t order() const noexcept { return order_; }

  S operator()(std::size_t i, std::size_t j) const {
    return i > j + 1 ? S{} : data_[i + j * order_];
  }

  /// Writable access inside the Hessenberg band; throws IndexOutOfRange
  /// outside of it.
  S& at(std::size_t i, std::size_t j);

  double frobenius_norm() const;

  template <Scalar U>
  HessMatrix<U> cast() const {
    HessMatrix<U> out(order_);
    for (std::size_t j = 0; j < order_; ++j)
      for (std::size_t i = 0; i <= std::min(j + 1, order_ - 1); ++i) out.at(i, j) = U(data_[i + j * order_]);
    return out;
  }

 private:
  std::size_t order_;
  std::vector<S> data_;
};

/// Solve H y = rhs with m-1 Givens rotations and back substitution.
/// Throws SingularReducedSystem when a rotated diagonal entry is below
/// eps * ||H||_F.
template <Scalar S>
std::vector<S> solve_hessenberg(const HessMatrix<S>& H, std::span<const S> rhs);

/// Solve (H - sigma I) y = beta e1 without modifying H.
template <Scalar S>
std::vector<S> solve_shifted_hessenberg(const HessMatrix<S>& H, S sigma, S beta);

/// New residual coefficient -h_sub * y.back() of a shifted Galerkin step.
template <Scalar S>
S collinearity_scalar(S h_sub, std::span<const S> y) {
  return -h_sub * y.back();
}

}  // namespace shiftkrylov
