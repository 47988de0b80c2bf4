// ---------------------------------------------------------------------------
// specfun.hpp -- complex special functions used throughout the laboratory:
//
//   * gamma_c / lgamma_c : complex Gamma via asymptotic (Stirling) series with
//     argument raising and reflection.  lgamma_c is only defined up to an
//     additive multiple of 2*pi*i; every consumer exponentiates sums or
//     differences, for which that ambiguity cancels.
//   * hurwitz_zeta(s, a) : Euler-Maclaurin with tail shift N >= max(Nmin,|s|)
//     and Bernoulli correction terms.
//   * twisted_zeta(s, a, c) = zeta^(a/c)(s) = sum_n e(an/c) n^{-s}
//                           = c^{-s} sum_{r=1}^{c} e(ar/c) zeta(s, r/c).
//   * G^{+-}(s)  = (2 pi)^{-s} Gamma(s) exp(+- i pi s / 2),
//     the gamma factors of the Hurwitz zeta functional equation
//         zeta(s, a/c) = sum_{+-} G^{-+}(1-s) zeta^{(+-a/c)}(1-s).
//   * G_f^{+-}(s): gamma factors of the Voronoi / functional equation of the
//     Estermann function attached to a Maass form with spectral parameter t
//     and parity eps (Eisenstein case: t = 0, eps = +1):
//         L(s, a/c, f) = sum_{+-} G_f^{-+}(1-s) c^{1-2s} L(1-s, +-abar/c, f).
//   * estermann(s, a, c) = c^{-2s} sum_{r1,r2<=c} e(a r1 r2/c)
//                              zeta(s,r1/c) zeta(s,r2/c),
//     plus its double-pole Laurent data at s=1.
// ---------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <vector>

#include "lab/prec.hpp"

namespace lab {

// Precision-dependent knobs.
template <class R> struct spec_cfg;
template <> struct spec_cfg<real64> {
  static constexpr double lgamma_thresh = 18.0;
  static constexpr int    lgamma_terms  = 12;
  static constexpr int    hz_nmin       = 14;
  static constexpr int    hz_terms      = 13;
};
template <> struct spec_cfg<real128> {
  static constexpr double lgamma_thresh = 40.0;
  static constexpr int    lgamma_terms  = 25;
  static constexpr int    hz_nmin       = 34;
  static constexpr int    hz_terms      = 25;
};

// log(sin(pi z)) up to a multiple of 2*pi*i, stable for large |Im z|.
template <class C> C log_sin_pi(const C& z) {
  using R = scalar_of_t<C>;
  const R pi = const_pi<R>();
  const C ipz = C(-pi * z.imag(), pi * z.real());  // i*pi*z
  const C two_i(R(0), R(2));
  if (z.imag() >= 0) {
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
    return -ipz + log(exp(R(2) * ipz) - C(R(1))) - log(two_i);
  }
  // sin(pi z) = e^{i pi z} (1 - e^{-2 i pi z}) / (2i)
  return ipz + log(C(R(1)) - exp(R(-2) * ipz)) - log(two_i);
}

// log Gamma(z), up to a multiple of 2*pi*i.
template <class C> C lgamma_c(C z) {
  using R = scalar_of_t<C>;
  const auto& B = bernoulli_2k<R>();
  const R half = R(1) / R(2);
  if (z.real() < half) {
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return log(const_pi<R>()) - log_sin_pi(z) - lgamma_c(C(R(1)) - z);
  }
  // Stirling coefficients B_{2k} / (2k (2k-1)), computed once
  static const auto coeff = [&B] {
    std::array<R, sizeof(B) / sizeof(B[0])> c;
    for (size_t k = 1; k <= c.size(); ++k) c[k - 1] = B[k - 1] / R((2 * k) * (2 * k - 1));
    return c;
  }();
  // raise the argument so the asymptotic series converges fast
  C shift_prod(R(1));
  bool shifted = false;
  const R thr2 = R(spec_cfg<R>::lgamma_thresh) * R(spec_cfg<R>::lgamma_thresh);
  while (z.real() * z.real() + z.imag() * z.imag() < thr2) {
    shift_prod *= z;
    z += R(1);
    shifted = true;
  }
  const C inv_z  = C(R(1)) / z;
  const C inv_z2 = inv_z * inv_z;
  C ser(R(0));
  C zp = inv_z;
  for (int k = 1; k <= spec_cfg<R>::lgamma_terms; ++k) {
    ser += coeff[k - 1] * zp;
    zp *= inv_z2;
  }
  C lg = (z - half) * log(z) - z + half * const_log2pi<R>() + ser;
  if (shifted) lg -= log(shift_prod);
  return lg;
}

template <class C> C gamma_c(const C& z) { return exp(lgamma_c(z)); }

// x^{-s} for real x > 0.
template <class C> inline C rpow_ns(scalar_of_t<C> x, const C& s) {
  return exp(-s * log(x));
}

// Hurwitz zeta(s, a), a > 0 real, s != 1.  Euler-Maclaurin.
template <class C> C hurwitz_zeta(const C& s, scalar_of_t<C> a) {
  using R = scalar_of_t<C>;
  if constexpr (std::is_same_v<C, cplx64>) {
    // For Re s < -1/2 the Euler-Maclaurin pieces are ~N^{|Re s|} while the
    // value stays moderate; run those in quad precision and round once.
    if (s.real() < -0.5) {
      cplx128 v = hurwitz_zeta(cplx128(s.real(), s.imag()), real128(a));
      return to_cplx64(v);
    }
  }
  const int K = spec_cfg<R>::hz_terms;
  // Pick the shift N from the Euler-Maclaurin convergence ratio
  // theta = (|s| + 2K + 1) / (2 pi (N + a)): N ~ ratio/3 keeps theta < 0.5
  // while keeping N as small as possible -- for Re s < 0 the partial sum
  // grows like N^{|Re s|} and a large N amplifies cancellation.
  int N;
  {
    double as = static_cast<double>(abs(s));
    double denom = (spec_cfg<R>::hz_nmin > 20) ? 2.4 : 3.0;
    N = static_cast<int>((as + 2.0 * K + 1.0) / denom) + 1;
    int nmin = spec_cfg<R>::hz_nmin;
    if (N < nmin) N = nmin;
  }
  const auto& B = bernoulli_2k<R>();
  C sum(R(0));
  for (int n = 0; n < N; ++n) sum += rpow_ns<C>(a + R(n), s);
  const R x = a + R(N);
  const C xms = rpow_ns<C>(x, s);          // x^{-s}
  sum += xms * x / (s - R(1));             // x^{1-s} / (s-1)
  sum += xms / R(2);
  C xpow = xms / x;                        // x^{-s-1}
  C poch = s;                              // (s)_1
  R fct(2);                                // (2k)! running
  const R x2 = x * x;
  for (int k = 1; k <= K; ++k) {
    sum += B[k - 1] / fct * poch * xpow;
    poch *= (s + R(2 * k - 1)) * (s + R(2 * k));
    xpow /= x2;
    fct *= R((2 * k + 1) * (2 * k + 2));
  }
  return sum;
}

template <class C> inline C riemann_zeta(const C& s) {
  using R = scalar_of_t<C>;
  return hurwitz_zeta(s, R(1));
}

// Row zeta(s, r/c) for r = 1..c (r = c entry equals zeta(s)).
template <class C> std::vector<C> hurwitz_row(const C& s, int64_t c) {
  using R = scalar_of_t<C>;
  std::vector<C> row(static_cast<size_t>(c));
  for (int64_t r = 1; r <= c; ++r)
    row[static_cast<size_t>(r - 1)] = hurwitz_zeta(s, R(r) / R(c));
  return row;
}

// zeta^{(a/c)}(s) = c^{-s} sum_{r=1}^{c} e(ar/c) zeta(s, r/c), from a row.
template <class C>
C twisted_zeta_from_row(const C& s, int64_t a, int64_t c, const std::vector<C>& row) {
  using R = scalar_of_t<C>;
  C acc(R(0));
  for (int64_t r = 1; r <= c; ++r) {
    int64_t k = ((a % c) * (r % c)) % c;
    if (k < 0) k += c;
    acc += e_of<C>(R(k) / R(c)) * row[static_cast<size_t>(r - 1)];
  }
  return rpow_ns<C>(R(c), s) * acc;
}

template <class C> C twisted_zeta(const C& s, int64_t a, int64_t c) {
  return twisted_zeta_from_row(s, a, c, hurwitz_row<C>(s, c));
}

// G^{+-}(s) = (2 pi)^{-s} Gamma(s) exp(+- i pi s / 2)
template <class C> C G_pm(const C& s, int sign) {
  using R = scalar_of_t<C>;
  const R pi = const_pi<R>();
  C phase = C(R(0), R(sign) * pi / R(2)) * s;
  return exp(-s * const_log2pi<R>() + lgamma_c(s) + phase);
}

// G_f^{+-}(s) for spectral parameter t and parity eps (Eisenstein: t=0, eps=+1)
template <class C> C Gf_pm(const C& s, int sign, scalar_of_t<C> t = 0, int eps = +1) {
  using R = scalar_of_t<C>;
  const C it(R(0), t);
  const R h = R(1) / R(2);
  C termA = exp(lgamma_c(h * (s + it)) + lgamma_c(h * (s - it))
                - lgamma_c(h * (C(R(1)) - s + it)) - lgamma_c(h * (C(R(1)) - s - it)));
  C termB = exp(lgamma_c(h * (C(R(1)) + s + it)) + lgamma_c(h * (C(R(1)) + s - it))
                - lgamma_c(h * (C(R(2)) - s + it)) - lgamma_c(h * (C(R(2)) - s - it)));
  C val = termA - R(sign) * termB;
  if (sign < 0 && eps < 0) val = -val;
  // Overall normalisation (1/2) pi^{1-2s}.  With it, at c=1 and t=0 the even
  // combination G^+ + G^- = pi^{1-2s} GG/GG reproduces the zeta(s)^2
  // functional equation exactly (via duplication + reflection it equals
  // chi(1-s)^2 with chi the usual zeta quotient).
  const R pi = const_pi<R>();
  return val * (exp((C(R(1)) - R(2) * s) * log(pi)) / R(2));
}

namespace detail {
inline int64_t egcd(int64_t a, int64_t b, int64_t& x, int64_t& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  int64_t x1, y1;
  int64_t g = egcd(b, a % b, x1, y1);
  x = y1; y = x1 - (a / b) * y1;
  return g;
}
}  // namespace detail

inline int64_t inv_mod(int64_t a, int64_t m) {
  a %= m; if (a < 0) a += m;
  int64_t x, y;
  int64_t g = detail::egcd(a, m, x, y);
  (void)g;  // caller guarantees gcd(a, m) = 1
  x %= m; if (x < 0) x += m;
  return x;
}

// Estermann function D(s, a/c) attached to the divisor function.
template <class C>
C estermann_from_row(const C& s, int64_t a, int64_t c, const std::vector<C>& row) {
  using R = scalar_of_t<C>;
  C acc(R(0));
  for (int64_t r1 = 1; r1 <= c; ++r1) {
    C inner(R(0));
    for (int64_t r2 = 1; r2 <= c; ++r2) {
      int64_t k = ((((a % c) * (r1 % c)) % c) * (r2 % c)) % c;
      if (k < 0) k += c;
      inner += e_of<C>(R(k) / R(c)) * row[static_cast<size_t>(r2 - 1)];
    }
    acc += inner * row[static_cast<size_t>(r1 - 1)];
  }
  return rpow_ns<C>(R(c), R(2) * s) * acc;
}

template <class C> C estermann(const C& s, int64_t a, int64_t c) {
  return estermann_from_row(s, a, c, hurwitz_row<C>(s, c));
}

// Laurent data of estermann at the double pole s=1, by a 64-node circle of
// radius `rho` around s=1: returns (c_{-2}, c_{-1}) with
//   D(s, a/c) = c_{-2}/(s-1)^2 + c_{-1}/(s-1) + O(1).
template <class C>
std::pair<C, C> estermann_laurent(int64_t a, int64_t c,
                                  scalar_of_t<C> rho = scalar_of_t<C>(1) / 10,
                                  int nodes = 64) {
  using R = scalar_of_t<C>;
  C cm2(R(0)), cm1(R(0));
  for (int j = 0; j < nodes; ++j) {
    C w = e_of<C>(R(j) / R(nodes)) * rho;   // s - 1 on the circle
    C L = estermann<C>(C(R(1)) + w, a, c);
    cm2 += L * w * w;
    cm1 += L * w;
  }
  return {cm2 / R(nodes), cm1 / R(nodes)};
}

// Functional-equation residuals (absolute value of LHS - RHS).
template <class C>
scalar_of_t<C> hurwitz_fe_residual(const C& s, int64_t a, int64_t c) {
  using R = scalar_of_t<C>;
  // In double, the r-sum of the twisted zetas loses ~6 digits to cancellation
  // at the far end of the strip; run the whole identity in quad instead.
  if constexpr (std::is_same_v<C, cplx64>) {
    return static_cast<double>(
        hurwitz_fe_residual(cplx128(s.real(), s.imag()), a, c));
  }
  C lhs = hurwitz_zeta(s, R(a) / R(c));
  C one_m_s = C(R(1)) - s;
  auto row = hurwitz_row<C>(one_m_s, c);
  C rhs = G_pm(one_m_s, -1) * twisted_zeta_from_row(one_m_s, +a, c, row)
        + G_pm(one_m_s, +1) * twisted_zeta_from_row(one_m_s, -a, c, row);
  return abs(lhs - rhs);
}

template <class C>
scalar_of_t<C> estermann_fe_residual(const C& s, int64_t a, int64_t c,
                                     scalar_of_t<C> t = 0, int eps = +1) {
  using R = scalar_of_t<C>;
  if constexpr (std::is_same_v<C, cplx64>) {
    return static_cast<double>(estermann_fe_residual(
        cplx128(s.real(), s.imag()), a, c, real128(t), eps));
  }
  C lhs = estermann<C>(s, a, c);
  C one_m_s = C(R(1)) - s;
  int64_t abar = inv_mod(a, c);
  auto row = hurwitz_row<C>(one_m_s, c);
  C cpow = rpow_ns<C>(R(c), R(2) * s - R(1));  // c^{1-2s}
  C rhs = Gf_pm(one_m_s, -1, t, eps) * cpow * estermann_from_row(one_m_s, abar, c, row)
        + Gf_pm(one_m_s, +1, t, eps) * cpow * estermann_from_row(one_m_s, c - abar, c, row);
  return abs(lhs - rhs);
}

}  // namespace lab
