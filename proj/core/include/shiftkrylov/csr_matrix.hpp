#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "shiftkrylov/error.hpp"
#include "shiftkrylov/scalar.hpp"

namespace shiftkrylov {

/// Counts operator applications. One counter per solve; not shared between
/// concurrent solves.
struct MvpCounter {
  std::int64_t count = 0;
  void increment(std::int64_t by = 1) noexcept { count += by; }
};

template <Scalar T>
struct Triplet {
  index_t row;
  index_t col;
  T value;
};

/// Compressed sparse row matrix. Immutable after construction; column
/// indices are strictly increasing within each row.
template <Scalar T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix() = default;

  /// Validates every structural invariant; throws InvalidDimensions or
  /// IndexOutOfRange on violation.
  CsrMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_ptr, std::vector<index_t> col_idx,
            std::vector<T> values);

  index_t rows() const noexcept { return nrows_; }
  index_t cols() const noexcept { return ncols_; }
  index_t nnz() const noexcept { return static_cast<index_t>(values_.size()); }
  bool square() const noexcept { return nrows_ == ncols_; }

  const std::vector<index_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<index_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<T>& values() const noexcept { return values_; }

  /// Stored value at (i, j) or zero.
  T coeff(index_t i, index_t j) const;

  /// Max absolute row sum.
  double norm_inf() const;
  double norm_frobenius() const;

  CsrMatrix transpose() const;

  static CsrMatrix identity(index_t n);

 private:
  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<T> values_;
};

/// Build from (i, j, value) triplets, summing duplicates. Throws
/// IndexOutOfRange for indices outside the shape.
template <Scalar T>
CsrMatrix<T> from_triplets(index_t nrows, index_t ncols, std::span<const Triplet<T>> triplets);

template <Scalar T>
CsrMatrix<T> from_triplets(index_t nrows, index_t ncols, const std::vector<Triplet<T>>& triplets) {
  return from_triplets(nrows, ncols, std::span<const Triplet<T>>(triplets));
}

/// A - sigma I as a new matrix; the diagonal is stored explicitly.
template <Scalar T, Scalar U>
CsrMatrix<promote_t<T, U>> shift_diagonal(const CsrMatrix<T>& A, U sigma);

/// y = A x. Counts one MVP on `counter` when given.
template <Scalar T, Scalar X>
void matvec(const CsrMatrix<T>& A, std::span<const X> x, std::span<promote_t<T, X>> y,
            MvpCounter* counter = nullptr) {
  if (static_cast<index_t>(x.size()) != A.cols() || static_cast<index_t>(y.size()) != A.rows())
    throw DimensionMismatch("matvec: operator is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                            ", x has " + std::to_string(x.size()) + ", y has " + std::to_string(y.size()));
  using R = promote_t<T, X>;
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_idx();
  const auto& v = A.values();
  for (index_t i = 0; i < A.rows(); ++i) {
    R acc{};
    for (index_t k = rp[i]; k < rp[i + 1]; ++k) acc += v[k] * x[ci[k]];
    y[i] = acc;
  }
  if (counter) counter->increment();
}

template <Scalar T, Scalar X>
std::vector<promote_t<T, X>> matvec(const CsrMatrix<T>& A, std::span<const X> x, MvpCounter* counter = nullptr) {
  std::vector<promote_t<T, X>> y(static_cast<std::size_t>(A.rows()));
  matvec(A, x, std::span<promote_t<T, X>>(y), counter);
  return y;
}

template <Scalar T, Scalar X>
std::vector<promote_t<T, X>> matvec(const CsrMatrix<T>& A, const std::vector<X>& x, MvpCounter* counter = nullptr) {
  return matvec(A, std::span<const X>(x), counter);
}

}  // namespace shiftkrylov
