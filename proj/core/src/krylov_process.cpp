#include "shiftkrylov/krylov_process.hpp"

#include <numeric>
#include <string>

namespace shiftkrylov {

namespace {

template <Scalar T>
void check_start(const CsrMatrix<T>& A, std::span<const T> v, std::size_t steps, const char* who) {
  if (!A.square()) throw DimensionMismatch(std::string(who) + ": operator must be square");
  if (static_cast<index_t>(v.size()) != A.rows())
    throw DimensionMismatch(std::string(who) + ": start vector has length " + std::to_string(v.size()));
  if (steps == 0 || steps > static_cast<std::size_t>(A.rows()))
    throw InvalidDimensions(std::string(who) + ": steps must lie in [1, n]");
}

template <Scalar T>
HessenbergDecomposition<T> allocate(ProcessKind kind, index_t n, std::size_t steps) {
  HessenbergDecomposition<T> dec;
  dec.process = kind;
  dec.n = n;
  dec.basis.assign(static_cast<std::size_t>(n) * (steps + 1), T{});
  dec.hbar.assign((steps + 1) * steps, T{});
  dec.perm.resize(static_cast<std::size_t>(n));
  std::iota(dec.perm.begin(), dec.perm.end(), index_t{0});
  return dec;
}

// Re-pack hbar from (m+1) x m storage to (k+1) x k after an early stop.
template <Scalar T>
void finish(HessenbergDecomposition<T>& dec, std::size_t allocated, std::size_t k, bool breakdown) {
  if (k != allocated) {
    std::vector<T> packed((k + 1) * k, T{});
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i <= k; ++i) packed[i + j * (k + 1)] = dec.hbar[i + j * (allocated + 1)];
    dec.hbar = std::move(packed);
  }
  dec.steps = k;
  dec.breakdown = breakdown;
  dec.basis.resize(static_cast<std::size_t>(dec.n) * dec.basis_columns());
}

}  // namespace

template <Scalar T>
HessMatrix<T> HessenbergDecomposition<T>::square() const {
  HessMatrix<T> H(steps);
  for (std::size_t j = 0; j < steps; ++j)
    for (std::size_t i = 0; i <= std::min(j + 1, steps - 1); ++i) H.at(i, j) = h(i, j);
  return H;
}

template <Scalar T>
std::size_t pivot_select(std::span<const T> u, std::span<const index_t> perm, std::size_t start) {
  std::size_t best = start;
  double best_abs = -1.0;
  for (std::size_t q = start; q < perm.size(); ++q) {
    const double a = std::abs(u[static_cast<std::size_t>(perm[q])]);
    if (a > best_abs) {
      best_abs = a;
      best = q;
    }
  }
  return best;
}

template <Scalar T>
HessenbergDecomposition<T> run_hessenberg(const CsrMatrix<T>& A, std::span<const T> v, std::size_t steps,
                                          MvpCounter* counter) {
  check_start(A, v, steps, "run_hessenberg");
  const index_t n = A.rows();
  const auto un = static_cast<std::size_t>(n);
  auto dec = allocate<T>(ProcessKind::Hessenberg, n, steps);
  auto& perm = dec.perm;
  const std::size_t ld = steps + 1;
  auto col = [&](std::size_t j) { return std::span<T>(dec.basis.data() + j * un, un); };

  const std::size_t i0 = pivot_select(v, std::span<const index_t>(perm), 0);
  const T beta = v[static_cast<std::size_t>(perm[i0])];
  if (beta == T{}) throw ZeroStartVector("run_hessenberg: start vector is zero");
  dec.beta = beta;
  {
    auto l1 = col(0);
    for (std::size_t r = 0; r < un; ++r) l1[r] = v[r] / beta;
    l1[static_cast<std::size_t>(perm[i0])] = T(1.0);
    std::swap(perm[0], perm[i0]);
  }

  const double zero_tol = static_cast<double>(n) * unit_roundoff * A.norm_inf();
  std::vector<T> u(un);
  for (std::size_t j = 0; j < steps; ++j) {
    matvec(A, std::span<const T>(col(j)), std::span<T>(u), counter);
    // l_i vanishes on perm[0..i), so only positions i.. need updating.
    for (std::size_t i = 0; i <= j; ++i) {
      const auto li = col(i);
      const T hij = u[static_cast<std::size_t>(perm[i])];
      dec.hbar[i + j * ld] = hij;
      if (hij == T{}) continue;
      for (std::size_t q = i; q < un; ++q) {
        const auto r = static_cast<std::size_t>(perm[q]);
        u[r] -= hij * li[r];
      }
      u[static_cast<std::size_t>(perm[i])] = T{};
    }
    if (j + 1 >= un) {
      finish(dec, steps, j + 1, true);
      return dec;
    }
    const std::size_t piv = pivot_select(std::span<const T>(u), std::span<const index_t>(perm), j + 1);
    const T hnext = u[static_cast<std::size_t>(perm[piv])];
    // ||l_j||_inf == 1, so the scaled zero test reduces to n eps ||A||_inf.
    if (std::abs(hnext) <= zero_tol) {
      finish(dec, steps, j + 1, true);
      return dec;
    }
    dec.hbar[j + 1 + j * ld] = hnext;
    auto lnext = col(j + 1);
    for (std::size_t q = j + 1; q < un; ++q) {
      const auto r = static_cast<std::size_t>(perm[q]);
      lnext[r] = u[r] / hnext;
    }
    lnext[static_cast<std::size_t>(perm[piv])] = T(1.0);
    std::swap(perm[j + 1], perm[piv]);
  }
  finish(dec, steps, steps, false);
  return dec;
}

template <Scalar T>
HessenbergDecomposition<T> run_arnoldi(const CsrMatrix<T>& A, std::span<const T> v, std::size_t steps,
                                       MvpCounter* counter) {
  check_start(A, v, steps, "run_arnoldi");
  const index_t n = A.rows();
  const auto un = static_cast<std::size_t>(n);
  auto dec = allocate<T>(ProcessKind::Arnoldi, n, steps);
  const std::size_t ld = steps + 1;
  auto col = [&](std::size_t j) { return std::span<T>(dec.basis.data() + j * un, un); };

  const double vnorm = norm2(v);
  if (vnorm == 0.0) throw ZeroStartVector("run_arnoldi: start vector is zero");
  dec.beta = T(vnorm);
  {
    auto l1 = col(0);
    for (std::size_t r = 0; r < un; ++r) l1[r] = v[r] / vnorm;
  }

  const double zero_tol = static_cast<double>(n) * unit_roundoff * A.norm_inf();
  std::vector<T> u(un);
  for (std::size_t j = 0; j < steps; ++j) {
    matvec(A, std::span<const T>(col(j)), std::span<T>(u), counter);
    for (std::size_t i = 0; i <= j; ++i) {
      const auto li = col(i);
      T hij{};
      for (std::size_t r = 0; r < un; ++r) hij += conj(li[r]) * u[r];
      dec.hbar[i + j * ld] = hij;
      for (std::size_t r = 0; r < un; ++r) u[r] -= hij * li[r];
    }
    const double unorm = norm2(std::span<const T>(u));
    const double lj_inf = norm_inf(std::span<const T>(col(j)));
    if (j + 1 >= un || unorm <= zero_tol * lj_inf) {
      finish(dec, steps, j + 1, true);
      return dec;
    }
    dec.hbar[j + 1 + j * ld] = T(unorm);
    auto lnext = col(j + 1);
    for (std::size_t r = 0; r < un; ++r) lnext[r] = u[r] / unorm;
  }
  finish(dec, steps, steps, false);
  return dec;
}

template <Scalar T>
double verify_decomposition(const CsrMatrix<T>& A, const HessenbergDecomposition<T>& dec) {
  if (A.rows() != dec.n || !A.square()) throw DimensionMismatch("verify_decomposition: operator/basis mismatch");
  const auto un = static_cast<std::size_t>(dec.n);
  const std::size_t k = dec.steps;
  const std::size_t rows = dec.basis_columns();
  std::vector<T> residual(un * k);
  std::vector<T> u(un);
  for (std::size_t j = 0; j < k; ++j) {
    matvec(A, dec.column(j), std::span<T>(u));
    for (std::size_t i = 0; i < rows && i <= j + 1; ++i) {
      const T hij = dec.h(i, j);
      const auto li = dec.column(i);
      for (std::size_t r = 0; r < un; ++r) u[r] -= hij * li[r];
    }
    std::copy(u.begin(), u.end(), residual.begin() + static_cast<std::ptrdiff_t>(j * un));
  }
  return norm2(std::span<const T>(residual));
}

template struct HessenbergDecomposition<double>;
template struct HessenbergDecomposition<cplx>;
template std::size_t pivot_select(std::span<const double>, std::span<const index_t>, std::size_t);
template std::size_t pivot_select(std::span<const cplx>, std::span<const index_t>, std::size_t);
template HessenbergDecomposition<double> run_hessenberg(const CsrMatrix<double>&, std::span<const double>,
                                                        std::size_t, MvpCounter*);
template HessenbergDecomposition<cplx> run_hessenberg(const CsrMatrix<cplx>&, std::span<const cplx>, std::size_t,
                                                      MvpCounter*);
template HessenbergDecomposition<double> run_arnoldi(const CsrMatrix<double>&, std::span<const double>, std::size_t,
                                                     MvpCounter*);
template HessenbergDecomposition<cplx> run_arnoldi(const CsrMatrix<cplx>&, std::span<const cplx>, std::size_t,
                                                   MvpCounter*);
template double verify_decomposition(const CsrMatrix<double>&, const HessenbergDecomposition<double>&);
template double verify_decomposition(const CsrMatrix<cplx>&, const HessenbergDecomposition<cplx>&);

}  // namespace shiftkrylov
