#pragma once

#include <span>
#include <vector>

#include "shiftkrylov/csr_matrix.hpp"
#include "shiftkrylov/hessenberg_solve.hpp"

namespace shiftkrylov {

enum class ProcessKind { Hessenberg, Arnoldi };

/// A L_k = L_{k+1} Hbar_k as produced by either Krylov process.
///
/// For the Hessenberg process the basis satisfies, in permuted order,
/// (l_j)[perm[i]] == 0 for i < j and (l_j)[perm[j]] == 1 exactly, with every
/// entry bounded by 1 in modulus. For Arnoldi the columns are orthonormal
/// and perm is the identity.
template <Scalar T>
struct HessenbergDecomposition {
  ProcessKind process = ProcessKind::Hessenberg;
  index_t n = 0;
  /// Completed steps k.
  std::size_t steps = 0;
  /// True when h_{k+1,k} == 0 terminated the process; the basis then holds
  /// only k columns.
  bool breakdown = false;
  /// Normalisation of the start vector: v == beta * l_1.
  T beta{};
  std::vector<index_t> perm;
  /// Column-major n x basis_columns().
  std::vector<T> basis;
  /// Column-major (k+1) x k.
  std::vector<T> hbar;

  std::size_t basis_columns() const noexcept { return breakdown ? steps : steps + 1; }

  std::span<const T> column(std::size_t j) const {
    return {basis.data() + j * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }

  T h(std::size_t i, std::size_t j) const { return hbar[i + j * (steps + 1)]; }

  /// h_{k+1,k}; zero after breakdown.
  T subdiagonal() const { return breakdown ? T{} : h(steps, steps - 1); }

  /// Leading k x k block H_k.
  HessMatrix<T> square() const;
};

/// Position q in [start, perm.size()) maximising |u[perm[q]]|; the first
/// maximiser wins ties. `start` is the number of positions already fixed.
template <Scalar T>
std::size_t pivot_select(std::span<const T> u, std::span<const index_t> perm, std::size_t start);

/// Pivoted Hessenberg process. Exactly `steps` products with A unless a
/// breakdown (||u||_inf <= n eps ||A||_inf) stops it early.
template <Scalar T>
HessenbergDecomposition<T> run_hessenberg(const CsrMatrix<T>& A, std::span<const T> v, std::size_t steps,
                                          MvpCounter* counter = nullptr);

/// Modified Gram-Schmidt Arnoldi process.
template <Scalar T>
HessenbergDecomposition<T> run_arnoldi(const CsrMatrix<T>& A, std::span<const T> v, std::size_t steps,
                                       MvpCounter* counter = nullptr);

template <Scalar T>
HessenbergDecomposition<T> run_process(ProcessKind kind, const CsrMatrix<T>& A, std::span<const T> v,
                                       std::size_t steps, MvpCounter* counter = nullptr) {
  return kind == ProcessKind::Hessenberg ? run_hessenberg(A, v, steps, counter) : run_arnoldi(A, v, steps, counter);
}

/// ||A L_k - L_{k+1} Hbar_k||_F, or ||A L_k - L_k H_k||_F after breakdown.
template <Scalar T>
double verify_decomposition(const CsrMatrix<T>& A, const HessenbergDecomposition<T>& dec);

}  // namespace shiftkrylov
