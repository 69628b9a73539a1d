#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

namespace shiftkrylov {

using cplx = std::complex<double>;
using index_t = std::ptrdiff_t;

inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Scalar types the library is instantiated for.
template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, cplx>;

/// Result type of mixing a real and a complex scalar.
template <Scalar A, Scalar B>
using promote_t = std::conditional_t<is_complex_v<A> || is_complex_v<B>, cplx, double>;

inline double conj(double x) noexcept { return x; }
inline cplx conj(const cplx& z) noexcept { return std::conj(z); }

inline bool is_finite(double x) noexcept { return std::isfinite(x); }
inline bool is_finite(const cplx& z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <Scalar T>
double norm2(std::span<const T> x) {
  // Scaled accumulation avoids overflow for large entries.
  double scale = 0.0;
  double ssq = 1.0;
  auto accumulate = [&](double v) {
    if (v != 0.0) {
      const double a = std::abs(v);
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  };
  for (const T& v : x) {
    if constexpr (is_complex_v<T>) {
      accumulate(v.real());
      accumulate(v.imag());
    } else {
      accumulate(v);
    }
  }
  return scale * std::sqrt(ssq);
}

template <Scalar T>
double norm2(const std::vector<T>& x) {
  return norm2(std::span<const T>(x));
}

template <Scalar T>
double norm_inf(std::span<const T> x) {
  double m = 0.0;
  for (const T& v : x) m = std::max(m, std::abs(v));
  return m;
}

template <Scalar T>
double norm_inf(const std::vector<T>& x) {
  return norm_inf(std::span<const T>(x));
}

template <Scalar T>
std::vector<cplx> to_complex(std::span<const T> x) {
  return std::vector<cplx>(x.begin(), x.end());
}

}  // namespace shiftkrylov
