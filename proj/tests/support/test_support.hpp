#pragma once

// Random problem generators and dense reference computations shared by the
// unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include <shiftkrylov/csr_matrix.hpp>
#include <shiftkrylov/hessenberg_solve.hpp>

namespace testing {

using shiftkrylov::cplx;
using shiftkrylov::CsrMatrix;
using shiftkrylov::index_t;
using shiftkrylov::Triplet;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  index_t index(index_t lo, index_t hi) { return std::uniform_int_distribution<index_t>(lo, hi)(gen_); }
  cplx complex() { return {uniform(), uniform()}; }

  template <class T>
  T scalar() {
    if constexpr (std::is_same_v<T, cplx>)
      return complex();
    else
      return uniform();
  }

  template <class T>
  std::vector<T> vector(std::size_t n) {
    std::vector<T> v(n);
    for (auto& x : v) x = scalar<T>();
    return v;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Nonsymmetric sparse matrix with about density * n * n random entries plus
/// `diag` added to every diagonal entry.
template <class T = double>
CsrMatrix<T> random_sparse(Rng& rng, index_t n, double density, double diag = 0.0) {
  std::vector<Triplet<T>> trip;
  const auto target = static_cast<index_t>(std::ceil(density * static_cast<double>(n) * static_cast<double>(n)));
  for (index_t k = 0; k < target; ++k) trip.push_back({rng.index(0, n - 1), rng.index(0, n - 1), rng.scalar<T>()});
  // Keep every row nonempty so the operator has no zero rows.
  for (index_t i = 0; i < n; ++i) trip.push_back({i, i, T(diag) + rng.scalar<T>()});
  return shiftkrylov::from_triplets<T>(n, n, trip);
}

/// Upper-Hessenberg matrix with entries in [-1, 1] and `boost` added to the
/// diagonal.
template <class T>
shiftkrylov::HessMatrix<T> random_hessenberg(Rng& rng, std::size_t m, double boost) {
  shiftkrylov::HessMatrix<T> H(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i <= std::min(j + 1, m - 1); ++i) H.at(i, j) = rng.scalar<T>();
  for (std::size_t i = 0; i < m; ++i) H.at(i, i) += T(boost);
  return H;
}

template <class T>
Eigen::MatrixXcd dense(const CsrMatrix<T>& A) {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(A.rows(), A.cols());
  for (index_t i = 0; i < A.rows(); ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) M(i, A.col_idx()[k]) = A.values()[k];
  return M;
}

/// (A - sigma I)^{-1} b by dense LU with partial pivoting.
template <class T, class B>
std::vector<cplx> dense_shifted_solve(const CsrMatrix<T>& A, cplx sigma, std::span<const B> b) {
  Eigen::MatrixXcd M = dense(A);
  M.diagonal().array() -= sigma;
  Eigen::VectorXcd rhs(static_cast<index_t>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) rhs(static_cast<index_t>(i)) = b[i];
  const Eigen::VectorXcd x = M.partialPivLu().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

template <class A, class B>
double rel_diff(const std::vector<A>& x, const std::vector<B>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += std::norm(cplx(x[i]) - cplx(ref[i]));
    den += std::norm(cplx(ref[i]));
  }
  return std::sqrt(num / den);
}

/// sin of the angle between r and l, from the component of r orthogonal to l.
template <class L>
double sin_angle(const std::vector<cplx>& r, std::span<const L> l) {
  cplx dot{};
  double ll = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    dot += std::conj(cplx(l[i])) * r[i];
    ll += std::norm(cplx(l[i]));
  }
  const cplx c = dot / ll;
  double perp = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    perp += std::norm(r[i] - c * cplx(l[i]));
    rr += std::norm(r[i]);
  }
  return std::sqrt(perp / rr);
}

/// b - (A - sigma I) x
template <class T, class B>
std::vector<cplx> shifted_residual(const CsrMatrix<T>& A, cplx sigma, const std::vector<cplx>& x,
                                   std::span<const B> b) {
  auto r = shiftkrylov::matvec(A, std::span<const cplx>(x));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = cplx(b[i]) - (r[i] - sigma * x[i]);
  return r;
}

}  // namespace testing
