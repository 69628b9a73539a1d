#include "shiftkrylov/csr_matrix.hpp"

#include <algorithm>
#include <numeric>

namespace shiftkrylov {

template <Scalar T>
CsrMatrix<T>::CsrMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_ptr, std::vector<index_t> col_idx,
                        std::vector<T> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (nrows_ <= 0 || ncols_ <= 0) throw InvalidDimensions("CsrMatrix: dimensions must be positive");
  if (static_cast<index_t>(row_ptr_.size()) != nrows_ + 1)
    throw InvalidDimensions("CsrMatrix: row_ptr must have nrows+1 entries");
  if (col_idx_.size() != values_.size()) throw InvalidDimensions("CsrMatrix: col_idx and values differ in length");
  if (row_ptr_.front() != 0 || row_ptr_.back() != static_cast<index_t>(values_.size()))
    throw InvalidDimensions("CsrMatrix: row_ptr must start at 0 and end at nnz");
  for (index_t i = 0; i < nrows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidDimensions("CsrMatrix: row_ptr must be nondecreasing");
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= ncols_)
        throw IndexOutOfRange("CsrMatrix: column index " + std::to_string(col_idx_[k]) + " out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw InvalidDimensions("CsrMatrix: column indices must be strictly increasing within a row");
    }
  }
}

template <Scalar T>
T CsrMatrix<T>::coeff(index_t i, index_t j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it != last && *it == j) return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  return T{};
}

template <Scalar T>
double CsrMatrix<T>::norm_inf() const {
  double best = 0.0;
  for (index_t i = 0; i < nrows_; ++i) {
    double row = 0.0;
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) row += std::abs(values_[k]);
    best = std::max(best, row);
  }
  return best;
}

template <Scalar T>
double CsrMatrix<T>::norm_frobenius() const {
  return norm2(std::span<const T>(values_));
}

template <Scalar T>
CsrMatrix<T> CsrMatrix<T>::transpose() const {
  std::vector<index_t> rp(static_cast<std::size_t>(ncols_) + 1, 0);
  for (index_t c : col_idx_) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<index_t> next(rp.begin(), rp.end() - 1);
  std::vector<index_t> ci(col_idx_.size());
  std::vector<T> v(values_.size());
  // Rows are visited in order, so each output row stays sorted.
  for (index_t i = 0; i < nrows_; ++i) {
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const index_t dst = next[col_idx_[k]]++;
      ci[dst] = i;
      v[dst] = values_[k];
    }
  }
  return CsrMatrix(ncols_, nrows_, std::move(rp), std::move(ci), std::move(v));
}

template <Scalar T>
CsrMatrix<T> CsrMatrix<T>::identity(index_t n) {
  std::vector<index_t> rp(static_cast<std::size_t>(n) + 1);
  std::iota(rp.begin(), rp.end(), index_t{0});
  std::vector<index_t> ci(static_cast<std::size_t>(n));
  std::iota(ci.begin(), ci.end(), index_t{0});
  return CsrMatrix(n, n, std::move(rp), std::move(ci), std::vector<T>(static_cast<std::size_t>(n), T(1.0)));
}

template <Scalar T>
CsrMatrix<T> from_triplets(index_t nrows, index_t ncols, std::span<const Triplet<T>> triplets) {
  if (nrows <= 0 || ncols <= 0) throw InvalidDimensions("from_triplets: dimensions must be positive");
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw IndexOutOfRange("from_triplets: entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                            ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable sort keeps duplicate summation order equal to input order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(triplets[a].row, triplets[a].col) < std::tie(triplets[b].row, triplets[b].col);
  });

  std::vector<index_t> rp(static_cast<std::size_t>(nrows) + 1, 0);
  std::vector<index_t> ci;
  std::vector<T> v;
  ci.reserve(triplets.size());
  v.reserve(triplets.size());
  index_t last_row = -1;
  index_t last_col = -1;
  for (std::size_t idx : order) {
    const auto& t = triplets[idx];
    if (t.row == last_row && t.col == last_col) {
      v.back() += t.value;
      continue;
    }
    ci.push_back(t.col);
    v.push_back(t.value);
    ++rp[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  return CsrMatrix<T>(nrows, ncols, std::move(rp), std::move(ci), std::move(v));
}

template <Scalar T, Scalar U>
CsrMatrix<promote_t<T, U>> shift_diagonal(const CsrMatrix<T>& A, U sigma) {
  using R = promote_t<T, U>;
  if (!A.square()) throw DimensionMismatch("shift_diagonal: matrix must be square");
  std::vector<Triplet<R>> trip;
  trip.reserve(static_cast<std::size_t>(A.nnz() + A.rows()));
  for (index_t i = 0; i < A.rows(); ++i) {
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
      trip.push_back({i, A.col_idx()[k], R(A.values()[k])});
    trip.push_back({i, i, -R(sigma)});
  }
  return from_triplets<R>(A.rows(), A.cols(), std::span<const Triplet<R>>(trip));
}

template class CsrMatrix<double>;
template class CsrMatrix<cplx>;
template CsrMatrix<double> from_triplets(index_t, index_t, std::span<const Triplet<double>>);
template CsrMatrix<cplx> from_triplets(index_t, index_t, std::span<const Triplet<cplx>>);
template CsrMatrix<double> shift_diagonal(const CsrMatrix<double>&, double);
template CsrMatrix<cplx> shift_diagonal(const CsrMatrix<double>&, cplx);
template CsrMatrix<cplx> shift_diagonal(const CsrMatrix<cplx>&, double);
template CsrMatrix<cplx> shift_diagonal(const CsrMatrix<cplx>&, cplx);

}  // namespace shiftkrylov
