#include "shiftkrylov/hessenberg_solve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shiftkrylov/error.hpp"

namespace shiftkrylov {

namespace {

template <Scalar S>
struct Givens {
  double c;
  S s;
};

// Rotation with [c s; -conj(s) c] [a; b] = [r; 0], c real.
template <Scalar S>
Givens<S> make_givens(S a, S b, S& r) {
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) {
    r = a;
    return {1.0, S{}};
  }
  const double abs_a = std::abs(a);
  if (abs_a == 0.0) {
    r = S(abs_b);
    return {0.0, conj(b) / abs_b};
  }
  const double nrm = std::hypot(abs_a, abs_b);
  const S phase = a / abs_a;
  r = phase * nrm;
  return {abs_a / nrm, phase * conj(b) / nrm};
}

}  // namespace

template <Scalar S>
HessMatrix<S>::HessMatrix(std::size_t order) : order_(order), data_(order * order, S{}) {
  if (order == 0) throw InvalidDimensions("HessMatrix: order must be at least 1");
}

template <Scalar S>
HessMatrix<S>::HessMatrix(std::size_t order, std::vector<S> column_major)
    : order_(order), data_(std::move(column_major)) {
  if (order == 0) throw InvalidDimensions("HessMatrix: order must be at least 1");
  if (data_.size() != order * order)
    throw InvalidDimensions("HessMatrix: expected " + std::to_string(order * order) + " entries");
  for (std::size_t j = 0; j < order; ++j)
    for (std::size_t i = j + 2; i < order; ++i)
      if (data_[i + j * order] != S{})
        throw InvalidDimensions("HessMatrix: nonzero below the first subdiagonal at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
}

template <Scalar S>
HessMatrix<S> HessMatrix<S>::identity(std::size_t order) {
  HessMatrix<S> H(order);
  for (std::size_t i = 0; i < order; ++i) H.at(i, i) = S(1.0);
  return H;
}

template <Scalar S>
S& HessMatrix<S>::at(std::size_t i, std::size_t j) {
  if (i >= order_ || j >= order_ || i > j + 1)
    throw IndexOutOfRange("HessMatrix: (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is outside the Hessenberg band");
  return data_[i + j * order_];
}

template <Scalar S>
double HessMatrix<S>::frobenius_norm() const {
  std::vector<S> band;
  band.reserve(order_ * 3);
  for (std::size_t j = 0; j < order_; ++j)
    for (std::size_t i = 0; i <= std::min(j + 1, order_ - 1); ++i) band.push_back(data_[i + j * order_]);
  return norm2(std::span<const S>(band));
}

template <Scalar S>
std::vector<S> solve_hessenberg(const HessMatrix<S>& H, std::span<const S> rhs) {
  const std::size_t m = H.order();
  if (rhs.size() != m)
    throw DimensionMismatch("solve_hessenberg: rhs has length " + std::to_string(rhs.size()) + ", expected " +
                            std::to_string(m));

  // Upper triangle of the rotated matrix, column-major m x m.
  std::vector<S> R(m * m, S{});
  std::vector<S> sub(m, S{});
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i <= j; ++i) R[i + j * m] = H(i, j);
    if (j + 1 < m) sub[j] = H(j + 1, j);
  }
  std::vector<S> y(rhs.begin(), rhs.end());

  for (std::size_t j = 0; j + 1 < m; ++j) {
    S r;
    const Givens<S> g = make_givens(R[j + j * m], sub[j], r);
    R[j + j * m] = r;
    // Rows j and j+1 of the remaining columns are both in the upper part.
    for (std::size_t k = j + 1; k < m; ++k) {
      const S top = R[j + k * m];
      const S bot = R[j + 1 + k * m];
      R[j + k * m] = g.c * top + g.s * bot;
      R[j + 1 + k * m] = -conj(g.s) * top + g.c * bot;
    }
    const S top = y[j];
    const S bot = y[j + 1];
    y[j] = g.c * top + g.s * bot;
    y[j + 1] = -conj(g.s) * top + g.c * bot;
  }

  const double threshold = unit_roundoff * H.frobenius_norm();
  for (std::size_t k = 0; k < m; ++k) {
    if (!(std::abs(R[k + k * m]) > threshold))
      throw SingularReducedSystem("solve_hessenberg: reduced system is numerically singular at column " +
                                      std::to_string(k),
                                  k);
  }

  for (std::size_t kk = m; kk-- > 0;) {
    S acc = y[kk];
    for (std::size_t c = kk + 1; c < m; ++c) acc -= R[kk + c * m] * y[c];
    y[kk] = acc / R[kk + kk * m];
  }
  return y;
}

template <Scalar S>
std::vector<S> solve_shifted_hessenberg(const HessMatrix<S>& H, S sigma, S beta) {
  HessMatrix<S> shifted = H;
  for (std::size_t i = 0; i < H.order(); ++i) shifted.at(i, i) -= sigma;
  std::vector<S> rhs(H.order(), S{});
  rhs[0] = beta;
  return solve_hessenberg(shifted, std::span<const S>(rhs));
}

template class HessMatrix<double>;
template class HessMatrix<cplx>;
template std::vector<double> solve_hessenberg(const HessMatrix<double>&, std::span<const double>);
template std::vector<cplx> solve_hessenberg(const HessMatrix<cplx>&, std::span<const cplx>);
template std::vector<double> solve_shifted_hessenberg(const HessMatrix<double>&, double, double);
template std::vector<cplx> solve_shifted_hessenberg(const HessMatrix<cplx>&, cplx, cplx);

}  // namespace shiftkrylov
