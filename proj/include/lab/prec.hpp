// ---------------------------------------------------------------------------
// prec.hpp -- scalar/complex types at the two working precisions.
//
// All analytic code is templated on the complex type C; the underlying real
// type is scalar_of_t<C>.  "double" is the fast path; IEEE binary128
// (~34 significant digits, via libquadmath) is the guarded path for
// evaluations with heavy cancellation (Phi at negative real part, see
// contour.hpp).
// ---------------------------------------------------------------------------
#pragma once

#include <array>
#include <complex>
#include <cstdlib>
#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>

#include "lab/tables.hpp"

namespace lab {

using real64  = double;
using cplx64  = std::complex<double>;
using real128 = boost::multiprecision::float128;
using cplx128 = boost::multiprecision::complex128;

template <class C> struct scalar_of;
template <> struct scalar_of<cplx64>  { using type = real64;  };
template <> struct scalar_of<cplx128> { using type = real128; };
template <class C> using scalar_of_t = typename scalar_of<C>::type;

template <class R> R parse_real(const char* s);
template <> inline real64  parse_real<real64>(const char* s)  { return std::strtod(s, nullptr); }
template <> inline real128 parse_real<real128>(const char* s) { return real128(s); }

template <class R> inline R const_pi() {
  static const R v = parse_real<R>("3.141592653589793238462643383279502884197");
  return v;
}
template <class R> inline R const_euler() {
  static const R v = parse_real<R>("0.5772156649015328606065120900824024310422");
  return v;
}
template <class R> inline R const_log2pi() {
  static const R v = parse_real<R>("1.837877066409345483560659472811235279723");
  return v;
}

// e(x) = exp(2*pi*i*x)
template <class C> inline C e_of(scalar_of_t<C> x) {
  using R = scalar_of_t<C>;
  R th = 2 * const_pi<R>() * x;
  return C(cos(th), sin(th));
}

inline cplx64 to_cplx64(const cplx128& z) {
  return cplx64(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}
inline cplx64 to_cplx64(const cplx64& z) { return z; }

template <class C> inline C to_c(const cplx64& z);
template <> inline cplx64  to_c<cplx64>(const cplx64& z)  { return z; }
template <> inline cplx128 to_c<cplx128>(const cplx64& z) { return cplx128(z.real(), z.imag()); }

// Gauss-Legendre order 32 nodes/weights on [-1,1], parsed at precision R.
template <class R> struct GL32 {
  static const std::array<R, 32>& nodes() {
    static const std::array<R, 32> v = [] {
      std::array<R, 32> a;
      for (int i = 0; i < 32; ++i) a[i] = parse_real<R>(tables::kGL32Nodes[i]);
      return a;
    }();
    return v;
  }
  static const std::array<R, 32>& weights() {
    static const std::array<R, 32> v = [] {
      std::array<R, 32> a;
      for (int i = 0; i < 32; ++i) a[i] = parse_real<R>(tables::kGL32Weights[i]);
      return a;
    }();
    return v;
  }
};

template <class R> inline const std::array<R, 30>& bernoulli_2k() {
  static const std::array<R, 30> v = [] {
    std::array<R, 30> a;
    for (int i = 0; i < 30; ++i) a[i] = parse_real<R>(tables::kBernoulli2k[i]);
    return a;
  }();
  return v;
}

}  // namespace lab
