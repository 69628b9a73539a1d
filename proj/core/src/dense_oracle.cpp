#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <string>

#include "shiftkrylov/error.hpp"
#include "shiftkrylov/matfunc.hpp"

namespace shiftkrylov {

namespace {

constexpr index_t max_dense_order = 500;
constexpr double max_condition = 1e8;

}  // namespace

template <Scalar T>
std::vector<cplx> dense_matfunc_oracle(const CsrMatrix<T>& A, std::span<const T> u0,
                                       const std::function<cplx(cplx)>& f) {
  if (!A.square()) throw DimensionMismatch("dense oracle: operator must be square");
  const index_t n = A.rows();
  if (static_cast<index_t>(u0.size()) != n) throw DimensionMismatch("dense oracle: u0 has the wrong length");
  if (n > max_dense_order)
    throw InvalidDimensions("dense oracle: order " + std::to_string(n) + " exceeds " + std::to_string(max_dense_order));

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) M(i, A.col_idx()[k]) = A.values()[k];

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(M);
  if (eig.info() != Eigen::Success) throw IllConditionedEigenbasis("dense oracle: eigendecomposition failed");
  const Eigen::MatrixXcd& V = eig.eigenvectors();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(V).singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= max_condition))
    throw IllConditionedEigenbasis("dense oracle: eigenvector condition number " + std::to_string(cond) +
                                   " exceeds 1e8");

  Eigen::VectorXcd u(n);
  for (index_t i = 0; i < n; ++i) u(i) = u0[i];
  Eigen::VectorXcd c = V.partialPivLu().solve(u);
  for (index_t i = 0; i < n; ++i) c(i) *= f(eig.eigenvalues()(i));
  const Eigen::VectorXcd out = V * c;
  return std::vector<cplx>(out.data(), out.data() + n);
}

template std::vector<cplx> dense_matfunc_oracle(const CsrMatrix<double>&, std::span<const double>,
                                                const std::function<cplx(cplx)>&);
template std::vector<cplx> dense_matfunc_oracle(const CsrMatrix<cplx>&, std::span<const cplx>,
                                                const std::function<cplx(cplx)>&);

}  // namespace shiftkrylov
