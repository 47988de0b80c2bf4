// ---------------------------------------------------------------------------
// reciprocity.cpp -- the reciprocity chain engine.
//
// Layout:
//   1. vertical-line grids with cached Phi values (WLine),
//   2. arithmetic-progression zeta rows with Euler-Maclaurin tails
//      (class_rows) and naive / CRT-split discrete Fourier transforms,
//   3. the z-line stages (characters, congruence sum, Poisson mod q,
//      companion branch),
//   4. the w-line stages (reciprocity, Poisson mod am / amq, Voronoi,
//      final Kloosterman-Psi form),
//   5. polar terms P1/P2 at w = 1 - v,
//   6. the Eisenstein spectral weight Theta^Eis and its transform,
//   7. finite rearrangement identities.
//
// Conventions used throughout:
//   * vertical integrals \int_{(c)} g dw / 2 pi i are uniform trapezoid sums
//     (h / 2 pi) sum_k g(c + i t_k) whenever the integrand decays
//     superexponentially along the line (driven by F), which makes the
//     trapezoid rule spectrally accurate; where a factor Phi rides the line
//     on its own, its non-decaying part is removed first and integrated in
//     closed form (see the reciprocity stage);
//   * lambda always denotes the divisor function tau (the weight of the
//     Eisenstein series E(z, 1/2)), so lambda(p) = 2 for every prime;
//   * "class row" Z[nu] = sum_{n == nu (c)} n^{-x}: direct terms to ~28c,
//     then Euler-Maclaurin in steps of c, giving ~30 digits uniformly.
// ---------------------------------------------------------------------------
#include "lab/reciprocity.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "lab/arith.hpp"
#include "lab/specfun.hpp"

namespace lab {

namespace {

using R = real128;
using C = cplx128;

const C kOne(R(1), R(0));
const C kZero(R(0), R(0));

inline C cc(double x) { return C(R(x), R(0)); }
inline C cconj(const C& z) { return C(z.real(), -z.imag()); }
inline double tod(const R& x) { return static_cast<double>(x); }

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline int64_t md(int64_t x, int64_t c) {
  x %= c;
  return x < 0 ? x + c : x;
}

// n^{-x} and n^{x} for integer n >= 1.
inline C powm(int64_t n, const C& x) { return exp(-x * log(R(n))); }
inline C powp(int64_t n, const C& x) { return exp(x * log(R(n))); }

int mu_of(int64_t n) { return SieveTables::shared().mu[static_cast<size_t>(n)]; }

std::vector<int64_t> prime_factors(int64_t n) {
  std::vector<int64_t> ps;
  for (int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

// zeta^{(N)}(x) = zeta(x) prod_{p | N} (1 - p^{-x})
C zeta_removed(const C& x, int64_t N) {
  C z = riemann_zeta(x);
  for (int64_t p : prime_factors(N)) z *= kOne - powm(p, x);
  return z;
}

// eta(n, t) = sum_{d1 d2 = n} (d1/d2)^{it}; real and even in t for real t.
// Local factor at p^e: sin((e+1) t log p) / sin(t log p)  (Dirichlet kernel).
R eta_pe(int64_t p, int e, const R& t) {
  R th = t * log(R(p));
  if (abs(th) < R(1e-12)) {
    // series: (e+1) (1 - (e(e+2)/6) th^2 + ...)
    return R(e + 1) * (R(1) - R(e * (e + 2)) / R(6) * th * th);
  }
  return sin(R(e + 1) * th) / sin(th);
}

R eta_quad(int64_t n, const R& t) {
  R v(1);
  for (int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; ++e; }
      v *= eta_pe(p, e, t);
    }
  if (n > 1) v *= eta_pe(n, 1, t);
  return v;
}

// Ordered factorizations of squarefree n into 2 / 3 / 4 positive parts.
std::vector<std::array<int64_t, 2>> fact2(int64_t n) {
  std::vector<std::array<int64_t, 2>> out;
  for (int64_t d : divisors(n)) out.push_back({d, n / d});
  return out;
}
std::vector<std::array<int64_t, 3>> fact3(int64_t n) {
  std::vector<std::array<int64_t, 3>> out;
  for (int64_t d1 : divisors(n))
    for (int64_t d2 : divisors(n / d1)) out.push_back({d1, d2, n / (d1 * d2)});
  return out;
}
std::vector<std::array<int64_t, 4>> fact4(int64_t n) {
  std::vector<std::array<int64_t, 4>> out;
  for (int64_t d1 : divisors(n))
    for (int64_t d2 : divisors(n / d1))
      for (int64_t d3 : divisors(n / (d1 * d2)))
        out.push_back({d1, d2, d3, n / (d1 * d2 * d3)});
  return out;
}

// ---------------------------------------------------------------------------
// Vertical-line grids with cached Phi values
// ---------------------------------------------------------------------------

struct WLine {
  double cre = 0, h = 0, tmax = 0;
  int K = 0;
  std::vector<C> w;            // nodes c + i t_k
  std::vector<C> phip, phim;   // Phi^{+-} at the (possibly mapped) argument
};

// Build a grid on Re w = cre.  The Phi argument is w itself, or, for the
// Psi-rows of the final stage, (1 + s - u - 2v - w)/2 (the substitution that
// turns the x^{2w} representation of Psi into a Mellin integral in x^{-w}).
// For real (s,u,v) the map commutes with conjugation and Phi^{+-}(conj w) =
// conj(Phi^{-+}(w)), so only the upper half of the grid is computed.
WLine build_line(const PhiContext<C>& phi, const ChainParams& p, double cre,
                 double height, double step, bool psi_arg, bool real_params) {
  WLine L;
  L.cre = cre;
  L.h = step;
  int half = static_cast<int>(std::ceil(height / step));
  L.K = 2 * half + 1;
  L.tmax = half * step;
  L.w.resize(L.K);
  L.phip.resize(L.K);
  L.phim.resize(L.K);
  const C su2v = kOne + p.s - p.u - cc(2) * p.v;
  for (int k = 0; k < L.K; ++k) L.w[k] = C(R(cre), R(step) * R(k - half));
  for (int k = real_params ? half : 0; k < L.K; ++k) {
    C arg = psi_arg ? (su2v - L.w[k]) / R(2) : L.w[k];
    auto pr = phi.phi_pair(arg);
    L.phip[k] = pr.first;
    L.phim[k] = pr.second;
    if (real_params && k > half) {
      L.phip[L.K - 1 - k] = cconj(L.phim[k]);
      L.phim[L.K - 1 - k] = cconj(L.phip[k]);
    }
  }
  return L;
}

// Same grid, but carrying sum_{n < Kp} (-1)^n p_n^{+-}(w) instead of
// Phi^{+-}: the head of the residue expansion past the first Kp poles of
// Gamma(w+z) of the kernel that actually weights the reciprocity stage,
//   int F(z) (b/a)^{-z} G^{-+}(w+z) G^{+-}(1-s-z) dz / 2 pi i
// (the w-kernel carries the sign *opposite* to the branch: the branch sign
// is fixed by the functional-equation factor G^{+-}(1-s-z) and its additive
// character, and the Mellin closure of e(-+ x) supplies G^{-+}(w)).  Flipping
// the sign of the w-kernel multiplies the n-th Gamma(w+z)-residue by
// e^{+- i pi n} = (-1)^n relative to p_n.  The same conjugation symmetry
// applies for real parameters.
WLine build_pline(const PhiContext<C>& phi, double cre, double height,
                  double step, int Kp, bool real_params) {
  WLine L;
  L.cre = cre;
  L.h = step;
  int half = static_cast<int>(std::ceil(height / step));
  L.K = 2 * half + 1;
  L.tmax = half * step;
  L.w.resize(L.K);
  L.phip.resize(L.K);
  L.phim.resize(L.K);
  for (int k = 0; k < L.K; ++k) L.w[k] = C(R(cre), R(step) * R(k - half));
  for (int k = real_params ? half : 0; k < L.K; ++k) {
    C sp = kZero, sm = kZero;
    for (int n = 0; n < Kp; ++n) {
      if (n % 2 == 0) {
        sp += phi.p_n(L.w[k], n, +1);
        sm += phi.p_n(L.w[k], n, -1);
      } else {
        sp -= phi.p_n(L.w[k], n, +1);
        sm -= phi.p_n(L.w[k], n, -1);
      }
    }
    L.phip[k] = sp;
    L.phim[k] = sm;
    if (real_params && k > half) {
      L.phip[L.K - 1 - k] = cconj(sm);
      L.phim[L.K - 1 - k] = cconj(sp);
    }
  }
  return L;
}

// Bare node grid (no Phi values); used for the z-line of the remainder pass.
WLine make_grid(double cre, double height, double step) {
  WLine L;
  L.cre = cre;
  L.h = step;
  int half = static_cast<int>(std::ceil(height / step));
  L.K = 2 * half + 1;
  L.tmax = half * step;
  L.w.resize(L.K);
  for (int k = 0; k < L.K; ++k) L.w[k] = C(R(cre), R(step) * R(k - half));
  return L;
}

// ---------------------------------------------------------------------------
// Class rows: Z[k][nu] = sum_{n >= 1, n == nu (c)} n^{-(a0 + eps w_k)}
//
// Direct terms to X ~ 28c (node-to-node recurrence: the ratio between
// consecutive nodes is exp(-i eps h log n), one complex multiply per node),
// then Euler-Maclaurin in steps of c from the first class element x0 > X:
//
//   sum_{j>=0} (x0 + jc)^{-x} = x0^{1-x}/(c(x-1)) + x0^{-x}/2
//       + sum_k B_{2k}/(2k)! c^{2k-1} (x)_{2k-1} x0^{-x-2k+1}.
//
// With theta = (|x| + 2K + 1)/(2 pi x0 / c) < 0.45 and K = 10 terms the
// truncated correction is accurate to ~1e-8 relative *to the tail*, which is
// itself O(X^{1-Re x}); absolute accuracy is far below every target here.
// ---------------------------------------------------------------------------
std::vector<std::vector<C>> class_rows(int64_t c, const C& a0, int eps,
                                       const WLine& L, int Kem = 10) {
  const int K = L.K;
  std::vector<std::vector<C>> z(K, std::vector<C>(static_cast<size_t>(c), kZero));
  const double W = tod(abs(a0)) + std::abs(L.cre) + L.tmax;
  int64_t X = static_cast<int64_t>(c * (W + 2.0 * Kem + 1.0) / (2.0 * 3.14159265 * 0.42)) + 1;
  if (X < 2 * c) X = 2 * c;
  const C s0 = a0 + R(eps) * L.w[0];
  for (int64_t n = 1; n <= X; ++n) {
    R ln = log(R(n));
    C cur = exp(-s0 * ln);
    R hl = R(L.h) * ln;
    C step(cos(hl), R(-eps) * sin(hl));
    size_t nu = static_cast<size_t>(n % c);
    for (int k = 0; k < K; ++k) {
      z[k][nu] += cur;
      cur *= step;
    }
  }
  const auto& B = bernoulli_2k<R>();
  const R cr(c);
  for (int64_t nu = 0; nu < c; ++nu) {
    int64_t x0 = X + 1 + md(nu - (X + 1), c);
    R lx = log(R(x0));
    C cur = exp(-s0 * lx);
    R hl = R(L.h) * lx;
    C step(cos(hl), R(-eps) * sin(hl));
    const R x0r(x0);
    const R ratio2 = (cr / x0r) * (cr / x0r);
    for (int k = 0; k < K; ++k) {
      const C x = a0 + R(eps) * L.w[k];
      C acc = cur * x0r / (cr * (x - kOne)) + cur / R(2);
      C poch = x;
      C xpow = cur / x0r * cr;
      R fct(2);
      for (int kk = 1; kk <= Kem; ++kk) {
        acc += B[kk - 1] / fct * poch * xpow;
        poch *= (x + R(2 * kk - 1)) * (x + R(2 * kk));
        xpow *= ratio2;
        fct *= R((2 * kk + 1) * (2 * kk + 2));
      }
      z[k][static_cast<size_t>(nu)] += acc;
      cur *= step;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Offset class sums around a positive rational shift D = Dnum / Dden at a
// continued exponent A (used with Re A < 0):
//
//   cls_plus  = sum_{n >= 1, n == alpha (c)} (n + D)^{-A}
//   cls_minus = ( sum_{n > D,     n == alpha (c)} (n - D)^{-A},
//                 sum_{1 <= n < D, n == alpha (c)} (D - n)^{-A} )
//
// The class elements on either side of D are arithmetic progressions of step
// c, so each sum collapses to Hurwitz zeta values zeta(A, x) with x in (0, 1]
// plus a difference for the finite block below D.  A class element exactly at
// n = D is skipped: these back the remainder kernel of the second-Poisson
// stages, which vanishes at that point (Re A < 0).  cmA caches c^{-A}.
// ---------------------------------------------------------------------------
C cls_plus(const C& A, const C& cmA, int64_t alpha, int64_t c, const R& D) {
  const int64_t a0 = alpha == 0 ? c : alpha;
  return cmA * hurwitz_zeta(A, (R(a0) + D) / R(c));
}

std::pair<C, C> cls_minus(const C& A, const C& cmA, int64_t alpha, int64_t c,
                          const R& D, int64_t Dnum, int64_t Dden) {
  const int64_t a0 = alpha == 0 ? c : alpha;
  int64_t Jle = 0;  // # class elements <= D
  if (Dnum >= a0 * Dden) Jle = (Dnum - a0 * Dden) / (c * Dden) + 1;
  const int64_t nlast = a0 + (Jle - 1) * c;  // largest class element <= D
  const bool hitD = Jle > 0 && nlast * Dden == Dnum;
  const int64_t J = Jle - (hitD ? 1 : 0);    // # class elements strictly < D
  const int64_t n0 = a0 + Jle * c;           // smallest class element > D
  C tail = cmA * hurwitz_zeta(A, (R(n0) - D) / R(c));
  C small = kZero;
  if (J > 0) {
    const R xmin = (D - R(a0 + (J - 1) * c)) / R(c);
    small = cmA * (hurwitz_zeta(A, xmin) - hurwitz_zeta(A, xmin + R(J)));
  }
  return {tail, small};
}

// out[j] = sum_nu e(j nu / c) in[nu], naive O(c^2).
std::vector<C> dft_naive(const std::vector<C>& in, const std::vector<C>& roots) {
  const int64_t c = static_cast<int64_t>(in.size());
  std::vector<C> out(static_cast<size_t>(c), kZero);
  for (int64_t nu = 0; nu < c; ++nu) {
    const C& zv = in[static_cast<size_t>(nu)];
    if (abs(zv) == R(0)) continue;
    int64_t idx = 0;
    for (int64_t j = 0; j < c; ++j) {
      out[static_cast<size_t>(j)] += roots[static_cast<size_t>(idx)] * zv;
      idx += nu;
      if (idx >= c) idx -= c;
    }
  }
  return out;
}

// Good-Thomas split for c = c1 c2 with (c1, c2) = 1:
//   e(j mu / c) = e((j c2bar mod c1) mu1 / c1) e((j c1bar mod c2) mu2 / c2),
// cost c (c1 + c2) instead of c^2.
std::vector<C> dft_crt(const std::vector<C>& in, int64_t c1, int64_t c2,
                       const std::vector<C>& r1, const std::vector<C>& r2) {
  const int64_t c = c1 * c2;
  std::vector<std::vector<C>> gh(static_cast<size_t>(c1),
                                 std::vector<C>(static_cast<size_t>(c2), kZero));
  for (int64_t mu = 0; mu < c; ++mu) {
    const C& zv = in[static_cast<size_t>(mu)];
    int64_t mu2 = mu % c2;
    auto& row = gh[static_cast<size_t>(mu % c1)];
    int64_t idx = 0;
    for (int64_t j2 = 0; j2 < c2; ++j2) {
      row[static_cast<size_t>(j2)] += r2[static_cast<size_t>(idx)] * zv;
      idx += mu2;
      if (idx >= c2) idx -= c2;
    }
  }
  const int64_t c2b = inv_mod(c2, c1);
  const int64_t c1b = inv_mod(c1, c2);
  std::vector<C> out(static_cast<size_t>(c), kZero);
  for (int64_t j = 0; j < c; ++j) {
    const int64_t a1 = (j % c1) * c2b % c1;
    const int64_t a2 = (j % c2) * c1b % c2;
    C acc = kZero;
    int64_t idx = 0;
    for (int64_t mu1 = 0; mu1 < c1; ++mu1) {
      acc += r1[static_cast<size_t>(idx)] * gh[static_cast<size_t>(mu1)][static_cast<size_t>(a2)];
      idx += a1;
      if (idx >= c1) idx -= c1;
    }
    out[static_cast<size_t>(j)] = acc;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Impl
// ---------------------------------------------------------------------------

struct ChainEngine::Impl {
  ChainParams p;
  ChainOptions opt;
  PhiContext<C> phi;
  TestFunctionF<C> F;
  bool real_params = false;
  bool initial_region = false;
  R fac_recip{0};  // h / 2 pi per line, stored per line below

  std::unique_ptr<WLine> Lprec, Lrz, Lp0, Lz2, Lm4, Lpsik, Lpsith;
  std::map<int64_t, std::vector<C>> roots_;
  std::map<int64_t, std::vector<int64_t>> invs_;
  // caches shared between the two second-Poisson stages (both run over the
  // same moduli c = a m): tau-class rows on the head grid, n-class rows on
  // the head grid, and the Taylor-shift row banks on the z-line.
  std::map<int64_t, std::vector<std::vector<C>>> trow0_, nrow0_;
  std::map<int64_t, std::vector<std::vector<std::vector<C>>>> rows_z2_;
  // polar terms (closed-form Laurent, default circle)
  bool have_p12 = false;
  C p1_cached = kZero, p2_cached = kZero;
  // numeric Laurent cache keyed by (numerator, modulus)
  std::map<std::pair<int64_t, int64_t>, std::pair<C, C>> laurent_cache_;
  // Psi-row coefficient arrays (final stage / Theta row), index
  // ((pm)(sigma)(tau)) with + first.
  std::array<std::vector<C>, 8> cpsi_k, cpsi_th;
  bool have_cpsi_k = false, have_cpsi_th = false;

  Impl(const ChainParams& p_, const ChainOptions& o)
      : p(p_), opt(o), phi(p_.s, p_.u, p_.v, p_.a, p_.b), F{p_.s, p_.u, p_.v} {}

  static int combo(int pm, int sg, int tu) {
    return ((pm > 0 ? 0 : 1) * 2 + (sg > 0 ? 0 : 1)) * 2 + (tu > 0 ? 0 : 1);
  }

  // p-part of the reciprocity line: sum of the first phi_terms residues
  const WLine& line_prec() {
    if (!Lprec)
      Lprec = std::make_unique<WLine>(build_pline(phi, 17.0 / 5.0, opt.p_height,
                                                  opt.p_step, opt.phi_terms, real_params));
    return *Lprec;
  }
  // z-line of the remainder pass, left of the first phi_terms Gamma(w+z) poles
  const WLine& line_rz() {
    if (!Lrz)
      Lrz = std::make_unique<WLine>(make_grid(-(17.0 / 5.0 + opt.phi_terms - 0.5),
                                              opt.rz_height, opt.rz_step));
    return *Lrz;
  }
  // Head grid of the second-Poisson stages (Re w = 0): carries the first k2()
  // residues of the Psi-kernel, which decay like F(-w-k) ~ e^{-Im(w)^2}.
  const WLine& line_p0() {
    if (!Lp0)
      Lp0 = std::make_unique<WLine>(
          build_pline(phi, 0.0, 10.0, opt.p_step, k2(), real_params));
    return *Lp0;
  }
  // z-line of the second-Poisson remainder pass.  Two constraints pick
  // Re z: (i) it must sit between the Gamma(w+z)-pole columns, Re z in
  // (-K, -K+1); (ii) Re(s+z) must be *negative*, so that the per-term
  // Gamma(w')Gamma(s+z-w') closure is absolutely convergent even on the
  // negative-real-axis boundary ray (the mixed-sign branches), where the
  // n = D term then contributes exactly zero.  For Re s = 5/2 this forces
  // K = k2() = 3 and Re z in (-3, -5/2); we sit at -(Re s + 1/5).
  const WLine& line_z2() {
    if (!Lz2)
      Lz2 = std::make_unique<WLine>(
          make_grid(-(tod(p.s.real()) + 0.2), 9.0, 0.25));
    return *Lz2;
  }
  int k2() const { return static_cast<int>(std::floor(tod(p.s.real()) + 0.2)) + 1; }
  const WLine& line_m4() {
    if (!Lm4)
      Lm4 = std::make_unique<WLine>(
          build_line(phi, p, -4.0, opt.line_height, opt.line_step, false, real_params));
    return *Lm4;
  }
  const WLine& line_psik() {
    if (!Lpsik)
      Lpsik = std::make_unique<WLine>(
          build_line(phi, p, 1.5, opt.psi_height, opt.psi_step, true, real_params));
    return *Lpsik;
  }
  const WLine& line_psith() {
    if (!Lpsith)
      Lpsith = std::make_unique<WLine>(
          build_line(phi, p, -0.25, opt.psi_height, opt.psi_step, true, real_params));
    return *Lpsith;
  }

  const std::vector<C>& roots(int64_t c) {
    auto it = roots_.find(c);
    if (it != roots_.end()) return it->second;
    std::vector<C> r(static_cast<size_t>(c));
    for (int64_t k = 0; k < c; ++k) r[static_cast<size_t>(k)] = e_of<C>(R(k) / R(c));
    return roots_.emplace(c, std::move(r)).first->second;
  }

  const std::vector<int64_t>& invs(int64_t c) {
    auto it = invs_.find(c);
    if (it != invs_.end()) return it->second;
    std::vector<int64_t> v(static_cast<size_t>(c), -1);
    for (int64_t x = 1; x < c; ++x)
      if (gcd_i64(x, c) == 1) v[static_cast<size_t>(x)] = inv_mod(x, c);
    if (c == 1) v.assign(1, 0);
    return invs_.emplace(c, std::move(v)).first->second;
  }

  // T[k][rho] = sum_{r == rho (c)} tau(r) r^{-(v+w_k)} on the head grid,
  // via the multiplicative split tau = 1 * 1: T = Z (*) Z with the index
  // convolution d e == rho (mod c).
  const std::vector<std::vector<C>>& tau_rows_p0(int64_t c) {
    auto it = trow0_.find(c);
    if (it != trow0_.end()) return it->second;
    const WLine& L = line_p0();
    auto Z = class_rows(c, p.v, +1, L);
    std::vector<std::vector<C>> T(static_cast<size_t>(L.K),
                                  std::vector<C>(static_cast<size_t>(c), kZero));
    for (int k = 0; k < L.K; ++k) {
      const auto& z = Z[static_cast<size_t>(k)];
      auto& t = T[static_cast<size_t>(k)];
      for (int64_t d = 0; d < c; ++d) {
        const C& zd = z[static_cast<size_t>(d)];
        int64_t idx = 0;
        for (int64_t e = 0; e < c; ++e) {
          t[static_cast<size_t>(idx)] += zd * z[static_cast<size_t>(e)];
          idx += d;
          if (idx >= c) idx -= c;
        }
      }
    }
    return trow0_.emplace(c, std::move(T)).first->second;
  }

  // N[k][rho] = sum_{n == rho (c)} n^{-(s-w_k)} on the head grid.
  const std::vector<std::vector<C>>& n_rows_p0(int64_t c) {
    auto it = nrow0_.find(c);
    if (it != nrow0_.end()) return it->second;
    return nrow0_.emplace(c, class_rows(c, p.s, -1, line_p0())).first->second;
  }

  // Taylor-shift row banks on the z-line: RT[j][k][rho] =
  // sum_{n == rho (c)} n^{-(s + j + z_k)}, j = 0 .. k2()-1.
  const std::vector<std::vector<std::vector<C>>>& rows_z2(int64_t c) {
    auto it = rows_z2_.find(c);
    if (it != rows_z2_.end()) return it->second;
    const WLine& Lz = line_z2();
    std::vector<std::vector<std::vector<C>>> RT(static_cast<size_t>(k2()));
    for (int j = 0; j < k2(); ++j)
      RT[static_cast<size_t>(j)] = class_rows(c, p.s + cc(j), +1, Lz);
    return rows_z2_.emplace(c, std::move(RT)).first->second;
  }

  // class values mod q at exponent x: cls[d] = sum_{n == d (q)} n^{-x}
  std::vector<C> class_vals_q(const C& x) const {
    auto row = hurwitz_row<C>(x, p.q);
    C qp = powm(p.q, x);
    std::vector<C> cls(static_cast<size_t>(p.q));
    for (int64_t d = 0; d < p.q; ++d)
      cls[static_cast<size_t>(d)] = qp * row[static_cast<size_t>((d == 0 ? p.q : d) - 1)];
    return cls;
  }

  // Psi-row coefficients: cpsi[combo][k] =
  //   (h/2pi) Phi^{pm}((1+s-u-2v-w_k)/2)
  //         * G_f^{-tau}((1-s+u+w_k)/2) * G^{-sigma}((s+u+2v-1+w_k)/2).
  void ensure_cpsi(const WLine& L, std::array<std::vector<C>, 8>& out) {
    const R fac = R(L.h) / (R(2) * const_pi<R>());
    std::vector<C> gfp(L.K), gfm(L.K), gsp(L.K), gsm(L.K);
    for (int k = 0; k < L.K; ++k) {
      const C w = L.w[k];
      const C af = (kOne - p.s + p.u + w) / R(2);
      const C ag = (p.s + p.u + cc(2) * p.v - kOne + w) / R(2);
      gfp[k] = Gf_pm(af, -1);  // tau = +1
      gfm[k] = Gf_pm(af, +1);  // tau = -1
      gsp[k] = G_pm(ag, -1);   // sigma = +1
      gsm[k] = G_pm(ag, +1);   // sigma = -1
    }
    for (int pm : {+1, -1})
      for (int sg : {+1, -1})
        for (int tu : {+1, -1}) {
          auto& v = out[static_cast<size_t>(combo(pm, sg, tu))];
          v.resize(L.K);
          const auto& ph = pm > 0 ? L.phip : L.phim;
          const auto& gf = tu > 0 ? gfp : gfm;
          const auto& gs = sg > 0 ? gsp : gsm;
          for (int k = 0; k < L.K; ++k) v[k] = fac * ph[k] * gf[k] * gs[k];
        }
  }

  // per-node data of the second-Poisson remainder z-line ------------------
  struct Z2 {
    std::vector<C> A;            // s + z_k
    std::vector<C> fb;           // (h/2pi) F(z) (b/a)^{-z}
    std::vector<C> gbP, gbM;     // G^{+-}(1-s-z): branch factors
    std::vector<C> p2A;          // (2 pi)^{-A}
    std::vector<C> etp, etm;     // e^{-+ i pi A / 2} (tau = +1 / -1)
    std::vector<C> eppA, epmA;   // e^{+- i pi A}
    std::vector<C> zetaA;        // zeta(A)
    std::vector<std::vector<C>> gamj;  // Gamma(A+j)/j!
  };
  std::unique_ptr<Z2> z2_;
  const Z2& z2pre();

  // Moving the w-line from Re w = 17/5 (reciprocity stage) to Re w = 0
  // (second-Poisson stages) crosses the pole of the additively twisted
  // n-sum at w = s (the Lerch exponent 1 - s + w hits 1 there, whenever
  // am | br).  The residue carries sum_{+-} Psi^{+-}(s), and at w = s the
  // two branch kernels add up to exactly one:
  //   sum_{+-} G^{-+}(s+z) G^{+-}(1-s-z) = Gamma(s+z)Gamma(1-s-z)
  //       2 cos(pi(1/2 - s - z)) / (2 pi) = 1,
  // so sum_{+-} Psi^{+-}(s) = (1/2 pi i) int F(z) (b/a)^{-z} dz.
  bool have_psis_ = false;
  C psis_ = kZero;
  const C& psi_sum_s() {
    if (!have_psis_) {
      auto node = [&](const C& z) -> C { return F(z) * exp(-z * phi.log_ba); };
      psis_ = integrate_vertical<C>(node, R(0), R(opt.z_tol), R(opt.z_height));
      have_psis_ = true;
    }
    return psis_;
  }
  // sum over r with c | b'r of tau(r) r^{-(v+s)} (the residue r-sums)
  C polar_rsum(int64_t c, int64_t bp) {
    const int64_t step = c / std::gcd(c, bp);
    const auto& tau = SieveTables::shared().tau;
    const C e = -(p.v + p.s);
    C acc = kZero;
    for (int64_t r = step; r <= 20000; r += step)
      acc += R(tau[static_cast<size_t>(r)]) * exp(e * log(R(r)));
    return acc;
  }

  // sigma-line collapse of the matching-sign remainder pieces.  The r-sum of
  // the matching-sign rows decays too slowly to truncate (the row magnitude
  // only falls off like a small power of br/q), so instead the subtracted
  // kernel is written as its Mellin-Barnes integral and w' = z + sigma is
  // substituted.  That decouples the z-line from the (r, n) sums:
  //   sum_{r,n} tau(r) r^{-v} n^{-A} D^z K_s(n/D)
  //     = (1/2pi i) int Gamma(z+sigma) Gamma(s-sigma) e^{-sigma lsc}
  //         [tau class rows at v+sigma paired with n class rows at s-sigma]
  //       dsigma
  // on Re sigma = 1/5, where the w'-line sits between the j = 2 and j = 3
  // kernel poles for every z-node and both sums converge absolutely.  The
  // z-dependence enters only through Gamma(z+sigma), so the z-line collapses
  // once into zacc(sigma) and each m costs one pass of class-row evaluations.
  std::vector<C> sg_nodes_, sg_wt_;  // sigma nodes; (h/2pi) Gamma(s-sg) zacc
  int64_t sg_cache_c_ = -1;
  std::vector<std::vector<C>> sgH_, sgN_;  // class rows per sigma node
  void sigma_pre();
  void sigma_rows(int64_t c);
  C ss_sigma(int64_t c, int64_t stepmul, const R& lsc, bool mulq);

  // stage evaluators -------------------------------------------------------
  StageValue d_chars();
  StageValue d_series();
  StageValue d_poisson();
  StageValue t3_series();
  void pass_recip(StageValue& rec, StageValue& t3p);
  StageValue tilde2();
  StageValue tilde3();
  StageValue tast();
  StageValue final1();
  C residue(bool isP2, bool numeric, int64_t numerator, double radius, int64_t dcut);
  void ensure_p12() {
    if (have_p12) return;
    p1_cached = residue(false, false, 1, opt.res_radius, opt.d_cut);
    p2_cached = residue(true, false, 1, opt.res_radius, opt.d_cut);
    have_p12 = true;
  }
};

// ---------------------------------------------------------------------------
// z-line stages
// ---------------------------------------------------------------------------

StageValue ChainEngine::Impl::d_chars() {
  Timer tm;
  const int64_t q = p.q;
  PrimeModulus pmq(q);
  // quad-precision character table chi[j][r], r = 0..q-1
  std::vector<std::vector<C>> chi(static_cast<size_t>(q - 1),
                                  std::vector<C>(static_cast<size_t>(q), kZero));
  for (int64_t j = 0; j < q - 1; ++j)
    for (int64_t r = 1; r < q; ++r)
      chi[static_cast<size_t>(j)][static_cast<size_t>(r)] =
          e_of<C>(R((j * pmq.dlog[static_cast<size_t>(r)]) % (q - 1)) / R(q - 1));
  const C q1sv = powp(q, kOne - p.s - p.v);
  const R orth = R(q) / R(q - 1);
  auto node = [&](const C& z) -> C {
    const C xs = p.s + z, xu = p.u + z, xv = p.v - z;
    auto rs = hurwitz_row<C>(xs, q);
    auto ru = hurwitz_row<C>(xu, q);
    auto rv = hurwitz_row<C>(xv, q);
    const C qs = powm(q, xs), qu = powm(q, xu), qv = powm(q, xv);
    std::vector<C> Ls(static_cast<size_t>(q - 1), kZero),
        Lu(static_cast<size_t>(q - 1), kZero), Lvb(static_cast<size_t>(q - 1), kZero);
    for (int64_t j = 0; j < q - 1; ++j) {
      C as = kZero, au = kZero, av = kZero;
      for (int64_t r = 1; r < q; ++r) {
        const C& ch = chi[static_cast<size_t>(j)][static_cast<size_t>(r)];
        as += ch * rs[static_cast<size_t>(r - 1)];
        au += ch * ru[static_cast<size_t>(r - 1)];
        av += cconj(ch) * rv[static_cast<size_t>(r - 1)];
      }
      Ls[static_cast<size_t>(j)] = qs * as;
      Lu[static_cast<size_t>(j)] = qu * au;
      Lvb[static_cast<size_t>(j)] = qv * av;  // L(xv, conj chi_j)
    }
    const C zs = rs[static_cast<size_t>(q - 1)], zu = ru[static_cast<size_t>(q - 1)],
            zv = rv[static_cast<size_t>(q - 1)];
    C T = kZero;
    for (int64_t j = 1; j < q - 1; ++j) {  // primitive characters only
      const C cha = chi[static_cast<size_t>(j)][static_cast<size_t>(p.a % q)];
      const C chb = chi[static_cast<size_t>(j)][static_cast<size_t>(p.b % q)];
      T += cha * cconj(chb) * Ls[static_cast<size_t>(j)] * Lu[static_cast<size_t>(j)] *
           Lvb[static_cast<size_t>(j)] * Lvb[static_cast<size_t>(j)];
    }
    const C T1 = zs * (kOne - qs) * zu * (kOne - qu) * zv * zv * (kOne - qv) * (kOne - qv);
    const C T2 = q1sv * (cc(2) - qv) * zs * zu * (kOne - qu) * zv * zv;
    return F(z) * (orth * (T + T1) + T2);
  };
  StageValue sv;
  sv.value = integrate_vertical<C>(node, R(0), R(opt.z_tol), R(opt.z_height));
  sv.err_estimate = tod(abs(sv.value)) * opt.z_tol * 20;
  sv.seconds = tm.lap();
  return sv;
}

StageValue ChainEngine::Impl::d_series() {
  Timer tm;
  const int64_t q = p.q;
  auto node = [&](const C& z) -> C {
    auto clsn = class_vals_q(p.s + z);
    auto clsm = class_vals_q(p.u + z);
    auto clsr = class_vals_q(p.v - z);
    std::vector<C> ztt(static_cast<size_t>(q), kZero);
    for (int64_t d = 0; d < q; ++d)
      for (int64_t e = 0; e < q; ++e)
        ztt[static_cast<size_t>(d * e % q)] +=
            clsr[static_cast<size_t>(d)] * clsr[static_cast<size_t>(e)];
    C acc = kZero;
    for (int64_t mu = 1; mu < q; ++mu) {
      const int64_t base = inv_mod(p.a * mu, q) * (p.b % q) % q;
      C inner = kZero;
      for (int64_t rho = 0; rho < q; ++rho)
        inner += ztt[static_cast<size_t>(rho)] * clsn[static_cast<size_t>(base * rho % q)];
      acc += clsm[static_cast<size_t>(mu)] * inner;
    }
    return F(z) * R(q) * acc;
  };
  StageValue sv;
  sv.value = integrate_vertical<C>(node, R(0), R(opt.z_tol), R(opt.z_height));
  sv.err_estimate = tod(abs(sv.value)) * opt.z_tol * 20;
  sv.seconds = tm.lap();
  return sv;
}

StageValue ChainEngine::Impl::d_poisson() {
  Timer tm;
  const int64_t q = p.q;
  const auto& rt = roots(q);
  const int64_t abar = inv_mod(p.a, q);
  auto node = [&](const C& z) -> C {
    const C x1 = kOne - p.s - z;
    auto clsn = class_vals_q(x1);
    auto clsm = class_vals_q(p.u + z);
    auto clsr = class_vals_q(p.v - z);
    std::vector<C> ztt(static_cast<size_t>(q), kZero);
    for (int64_t d = 0; d < q; ++d)
      for (int64_t e = 0; e < q; ++e)
        ztt[static_cast<size_t>(d * e % q)] +=
            clsr[static_cast<size_t>(d)] * clsr[static_cast<size_t>(e)];
    std::vector<C> Fn(static_cast<size_t>(q), kZero);
    for (int64_t nu = 0; nu < q; ++nu) {
      int64_t idx = 0;
      for (int64_t j = 0; j < q; ++j) {
        Fn[static_cast<size_t>(j)] += rt[static_cast<size_t>(idx)] * clsn[static_cast<size_t>(nu)];
        idx += nu;
        if (idx >= q) idx -= q;
      }
    }
    C acc = kZero;
    for (int sg : {+1, -1}) {
      const int64_t c0 = md(-sg * abar * (p.b % q), q);
      C ts = kZero;
      for (int64_t mu = 1; mu < q; ++mu) {
        const int64_t mub = inv_mod(mu, q);
        C inner = kZero;
        for (int64_t rho = 0; rho < q; ++rho)
          inner += ztt[static_cast<size_t>(rho)] *
                   Fn[static_cast<size_t>(c0 * rho % q * mub % q)];
        ts += clsm[static_cast<size_t>(mu)] * inner;
      }
      acc += G_pm(x1, sg) * ts;
    }
    return F(z) * powp(q, x1) * acc;
  };
  StageValue sv;
  sv.value = integrate_vertical<C>(node, R(-4), R(opt.z_tol), R(opt.z_height));
  sv.err_estimate = tod(abs(sv.value)) * opt.z_tol * 20;
  sv.seconds = tm.lap();
  return sv;
}

StageValue ChainEngine::Impl::t3_series() {
  Timer tm;
  const int64_t q = p.q;
  const C lead = powp(q, cc(2) - p.s - p.u - cc(2) * p.v);
  auto node = [&](const C& z) -> C {
    const C zv = riemann_zeta(p.v - z);
    return (lead - powp(q, kOne - p.u - cc(2) * p.v + z)) * riemann_zeta(p.s + z) *
           riemann_zeta(p.u + z) * zv * zv * F(z);
  };
  StageValue sv;
  sv.value = integrate_vertical<C>(node, R(0), R(opt.z_tol), R(opt.z_height));
  sv.err_estimate = tod(abs(sv.value)) * opt.z_tol * 20;
  sv.seconds = tm.lap();
  return sv;
}

// ---------------------------------------------------------------------------
// Re w = 17/5: reciprocity stage and the companion branch after reciprocity.
// Both share the additively twisted n-rows mod am, so they are computed in
// one pass over m:
//
//  D_RECIP  = sum_{+-} \int Psi^{+-}(w) q^{1-s+w} (b/a)^{-w}
//               sum_{(m,q)=1} m^{-(u-w)} sum_r tau(r) r^{-(v+w)}
//                 sum_n e(+- qbar b r n / (am)) n^{-(1-s+w)} dw/2pi i,
//  T3_POISSON = sum_{+-} \int Psi^{+-}(w) q^{2-s-u-2v} (b/a)^{-w}
//               sum_m m^{-(u-w)} sum_r tau(r) r^{-(v+w)}
//                 sum_{(n,q)=1} e(+- b r n / (am)) n^{-(1-s+w)} dw/2pi i,
//
// where the weight of the branch with character e(+- .../(am)) is
//
//   Psi^{+-}(w) = int_{C(w)} F(z) (b/a)^{-z} G^{-+}(w+z) G^{+-}(1-s-z)
//                     dz / 2 pi i.
//
// The sign pairing is forced: the functional equation pairs G^{+-}(1-s-z)
// with e(-+ n alpha), additive reciprocity turns that character into
// e(+- qbar brn/am) e(-+ brn/(amq)), and the leftover exponential closes as
// e(-+ x) = \int_C G^{-+}(w) x^{-w} dw/2pi i -- so the w-kernel carries the
// sign opposite to the branch.  (For the companion branch the two
// exponentials cancel exactly, which pins the convention.)
//
// The w-integral cannot be done by a plain trapezoid: for one of the two
// signs the outer phase e^{+- i pi w/2} cancels the decay of Gamma(w+z)
// inside the kernel, and |Psi(17/5 + it)| stays at its t = 0 scale to
// astronomical heights (the envelope inf_K e^{(K+c)^2} t^{-K} only turns
// over near t ~ e^{40}).  Instead Psi is split at its first K = phi_terms
// Gamma(w+z)-residues,
//
//   Psi^{+-}(w) = p~_0(w) + ... + p~_{K-1}(w) + R_K(w),
//   p~_k(w) = (-1)^k p_k(w),
//   p_k(w) = ((-1)^k/k!) (2 pi)^{s-w-1} e^{+- i pi(w+1-s)/2}
//              F(-w-k) (b/a)^{w+k} Gamma(1-s+w+k)
//
// (the extra (-1)^k is the phase e^{-+ i pi k/2} of the opposite-sign
// w-kernel combining with e^{+- i pi k/2} from G^{+-}(1-s+w+k)).
//
// p-part: p~_k decays like F(-w-k) ~ e^{-Im(w)^2}, so the head is
// trapezoided on a short line (p_height, p_step) with exactly the row
// machinery below.
//
// Remainder: R_K(w) is the z-integral pushed to Re z = -(Re w + K - 1/2).
// It is never integrated in w; by Fubini the w-integral meets each Dirichlet
// term x^{-w} (x = brn/(amq); companion branch x = brn/(am), where all the
// q^w, (b/a)^{-w}, m^w, r^{-w}, n^{-w} factors collect) and closes up:
//
//   \int_{(1/2-K)} G^{-+}(w') x^{-w'} dw'/2pi i
//       = E_K^{-+}(x) := e(-+x) - sum_{j<K} (-+2 pi i x)^j / j!
//
// (the line Re(w+z) = 1/2-K has crossed exactly the first K Gamma poles), so
//
//   remainder = sum_{+-} \int_{(z0)} F(z) (b/a)^{-z} G^{+-}(1-s-z)
//       [ sum of the original series with x^z E_K^{-+}(x) in place of the
//         Psi-weight and the +- character ] dz / 2 pi i .
//
// The e(-+x) piece recombines with the additive character into frequency
// b r (q qbar - 1) mod amq (companion branch: untwisted) -- a bank of
// class-row DFTs at exponent n^{-(1-s-z)}; each Taylor piece j keeps the
// original character mod am and shifts the n- and r-exponents by j.  On the
// z-line F again supplies e^{-Im(z)^2} decay, but its phase oscillates at
// frequency 2|z0| ~ 11.8, so rz_step must keep 2 pi / h well above that
// (the node scale sits ~(|z0|+1/2)^2 e-digits above the answer, which is
// also why K must stay small).  All sub-sums are absolutely convergent
// (worst exponent: n at the last Taylor shift, Re = 1 - s + |z0| - (K-1)
// = 1 - s + 3.9, independently of K).
//
// The coprimality (n,q)=1 of the companion branch is handled in Fourier
// space: the q | n subsum is q^{-x} times the transform mod am (if q | m, mod
// am/q, reusing the m/q entry of the cache).
// ---------------------------------------------------------------------------
void ChainEngine::Impl::pass_recip(StageValue& rec, StageValue& t3p) {
  Timer tm;
  const int64_t q = p.q, M = opt.m_cut, Rcut = opt.r_cut;
  const int KP = std::min(std::max(opt.phi_terms, 1), 8);
  const R lnq = log(R(q));
  const C q23 = powp(q, cc(2) - p.s - p.u - cc(2) * p.v);
  const auto& tau = SieveTables::shared().tau;
  C vrec = kZero, v3 = kZero;
  double last_rec = 0, last_t3 = 0;

  // ---- p-part: short-line trapezoid of (p_0 + ... + p_{K-1}) * rows ------
  {
    const WLine& L = line_prec();
    const int K = L.K;
    const R fac = R(L.h) / (R(2) * const_pi<R>());
    std::vector<C> qb1(K), qb3(K), qpw(K);
    for (int k = 0; k < K; ++k) {
      qb1[k] = fac * exp((kOne - p.s + L.w[k]) * lnq - L.w[k] * phi.log_ba);
      qb3[k] = fac * q23 * exp(-L.w[k] * phi.log_ba);
      qpw[k] = exp(-(kOne - p.s + L.w[k]) * lnq);  // q^{-(1-s+w_k)}
    }
    std::map<int64_t, std::vector<std::vector<C>>> ln_cache;
    std::vector<C> Sp1(K), Sm1(K), Sp3(K), Sm3(K), mc(K);
    for (int64_t m = 1; m <= M; ++m) {
      const int64_t c = p.a * m;
      const auto& rt = roots(c);
      auto Z = class_rows(c, kOne - p.s, +1, L);
      std::vector<std::vector<C>> Ln(static_cast<size_t>(K));
      for (int k = 0; k < K; ++k)
        Ln[static_cast<size_t>(k)] = dft_naive(Z[static_cast<size_t>(k)], rt);
      // (n,q)=1 variant
      std::vector<std::vector<C>> An(static_cast<size_t>(K),
                                     std::vector<C>(static_cast<size_t>(c)));
      if (m % q != 0) {
        for (int k = 0; k < K; ++k)
          for (int64_t j = 0; j < c; ++j)
            An[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                Ln[static_cast<size_t>(k)][static_cast<size_t>(j)] -
                qpw[k] * Ln[static_cast<size_t>(k)][static_cast<size_t>(j * q % c)];
      } else {
        const auto& sub = ln_cache.at(m / q);
        const int64_t csub = p.a * (m / q);
        for (int k = 0; k < K; ++k)
          for (int64_t j = 0; j < c; ++j)
            An[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                Ln[static_cast<size_t>(k)][static_cast<size_t>(j)] -
                qpw[k] * sub[static_cast<size_t>(k)][static_cast<size_t>(j % csub)];
      }
      const R lnm = log(R(m));
      for (int k = 0; k < K; ++k) mc[k] = exp(-(p.u - L.w[k]) * lnm);
      const bool cop = (m % q != 0);
      int64_t e1p = 0, e1m = 0;
      if (cop) {
        e1p = md(inv_mod(q, c) * (p.b % c), c);
        e1m = (c - e1p) % c;
      }
      const int64_t e3p = md(p.b, c), e3m = (c - e3p) % c;
      std::fill(Sp1.begin(), Sp1.end(), kZero);
      std::fill(Sm1.begin(), Sm1.end(), kZero);
      std::fill(Sp3.begin(), Sp3.end(), kZero);
      std::fill(Sm3.begin(), Sm3.end(), kZero);
      int64_t i1p = 0, i1m = 0, i3p = 0, i3m = 0;
      for (int64_t r = 1; r <= Rcut; ++r) {
        if (cop) { i1p = (i1p + e1p) % c; i1m = (i1m + e1m) % c; }
        i3p = (i3p + e3p) % c;
        i3m = (i3m + e3m) % c;
        const R taur(tau[static_cast<size_t>(r)]);
        const R lnr = log(R(r));
        C cur = exp(-(p.v + L.w[0]) * lnr);
        const R hl = R(L.h) * lnr;
        const C step(cos(hl), -sin(hl));
        for (int k = 0; k < K; ++k) {
          const C t = taur * cur;
          if (cop) {
            Sp1[k] += t * Ln[static_cast<size_t>(k)][static_cast<size_t>(i1p)];
            Sm1[k] += t * Ln[static_cast<size_t>(k)][static_cast<size_t>(i1m)];
          }
          Sp3[k] += t * An[static_cast<size_t>(k)][static_cast<size_t>(i3p)];
          Sm3[k] += t * An[static_cast<size_t>(k)][static_cast<size_t>(i3m)];
          cur *= step;
        }
      }
      if (cop) {
        C dm = kZero;
        for (int k = 0; k < K; ++k)
          dm += qb1[k] * mc[k] * (L.phip[k] * Sp1[k] + L.phim[k] * Sm1[k]);
        vrec += dm;
        last_rec = tod(abs(dm));
      }
      {
        C dm = kZero;
        for (int k = 0; k < K; ++k)
          dm += qb3[k] * mc[k] * (L.phip[k] * Sp3[k] + L.phim[k] * Sm3[k]);
        v3 += dm;
        last_t3 = tod(abs(dm));
      }
      ln_cache.emplace(m, std::move(Ln));
    }
  }

  // ---- remainder: z-outer assembly with the E_K kernel -------------------
  {
    const WLine& Lz = line_rz();
    const int K = Lz.K;
    const R facz = R(Lz.h) / (R(2) * const_pi<R>());
    const R twopi = R(2) * const_pi<R>();
    std::vector<C> prefD(K), pref3(K), Gp(K), Gm(K);
    for (int k = 0; k < K; ++k) {
      const C z = Lz.w[k];
      const C fz = facz * F(z);
      prefD[k] = fz * exp((kOne - p.s - z) * lnq);  // q^{1-s-z}
      pref3[k] = fz * q23;
      Gp[k] = G_pm(kOne - p.s - z, +1);
      Gm[k] = G_pm(kOne - p.s - z, -1);
    }
    // q^{-(1-s-j-z_k)}: the (n,q)=1 subtraction at Taylor shift j
    std::vector<std::vector<C>> qpwj(static_cast<size_t>(KP), std::vector<C>(K));
    for (int j = 0; j < KP; ++j)
      for (int k = 0; k < K; ++k)
        qpwj[static_cast<size_t>(j)][static_cast<size_t>(k)] =
            exp(-(kOne - p.s - cc(j) - Lz.w[k]) * lnq);
    // plain (no coprimality) mod-am row banks, cached for the q | m reuse
    std::map<int64_t, std::vector<std::vector<std::vector<C>>>> row_cache;
    std::vector<C> SDp(K), SDm(K), S3p(K), S3m(K);
    for (int64_t m = 1; m <= M; ++m) {
      const int64_t ca = p.a * m, cq = ca * q;
      const bool cop = (m % q != 0);
      // e-piece rows mod amq at exponent 1-s-z (main branch only)
      std::vector<std::vector<C>> Lnq;
      if (cop) {
        auto Zq = class_rows(cq, kOne - p.s, -1, Lz);
        Lnq.resize(static_cast<size_t>(K));
        const auto& rq = roots(q);
        if (ca > 1) {
          const auto& rca = roots(ca);
          for (int k = 0; k < K; ++k)
            Lnq[static_cast<size_t>(k)] = dft_crt(Zq[static_cast<size_t>(k)], q, ca, rq, rca);
        } else {
          for (int k = 0; k < K; ++k)
            Lnq[static_cast<size_t>(k)] = dft_naive(Zq[static_cast<size_t>(k)], rq);
        }
      }
      // mod-am rows at exponents 1-s-j-z, j = 0..K-1
      std::vector<std::vector<std::vector<C>>> Ln(static_cast<size_t>(KP));
      {
        const auto& rca = roots(ca);
        for (int j = 0; j < KP; ++j) {
          auto Z = class_rows(ca, kOne - p.s - cc(j), -1, Lz);
          Ln[static_cast<size_t>(j)].resize(static_cast<size_t>(K));
          for (int k = 0; k < K; ++k)
            Ln[static_cast<size_t>(j)][static_cast<size_t>(k)] =
                dft_naive(Z[static_cast<size_t>(k)], rca);
        }
      }
      // companion-branch variants with (n,q)=1
      std::vector<std::vector<std::vector<C>>> An(
          static_cast<size_t>(KP),
          std::vector<std::vector<C>>(static_cast<size_t>(K),
                                      std::vector<C>(static_cast<size_t>(ca))));
      for (int j = 0; j < KP; ++j)
        for (int k = 0; k < K; ++k) {
          const auto& src = Ln[static_cast<size_t>(j)][static_cast<size_t>(k)];
          auto& dst = An[static_cast<size_t>(j)][static_cast<size_t>(k)];
          const C& qp = qpwj[static_cast<size_t>(j)][static_cast<size_t>(k)];
          if (cop) {
            for (int64_t f = 0; f < ca; ++f)
              dst[static_cast<size_t>(f)] =
                  src[static_cast<size_t>(f)] - qp * src[static_cast<size_t>(f * q % ca)];
          } else {
            const auto& sub = row_cache.at(m / q)[static_cast<size_t>(j)][static_cast<size_t>(k)];
            const int64_t csub = p.a * (m / q);
            for (int64_t f = 0; f < ca; ++f)
              dst[static_cast<size_t>(f)] =
                  src[static_cast<size_t>(f)] - qp * sub[static_cast<size_t>(f % csub)];
          }
        }
      // frequency steps per unit r
      const int64_t qbar = ca > 1 ? inv_mod(q, ca) : 0;
      // e(sigma qbar b r n / am) e(-sigma b r n / (amq)): combined frequency
      // b r (q qbar - 1) mod amq (for m = 1, a = 1 this is just -b r mod q);
      // companion branch: e(sigma b r n / am) e(-sigma b r n / (am)) = 1.
      const int64_t step_e = cop ? md(p.b % cq * ((q * qbar + cq - 1) % cq), cq) : 0;
      const int64_t step_T = cop ? md(qbar * (p.b % ca), ca) : 0;
      const int64_t step_3T = md(p.b, ca);
      std::fill(SDp.begin(), SDp.end(), kZero);
      std::fill(SDm.begin(), SDm.end(), kZero);
      std::fill(S3p.begin(), S3p.end(), kZero);
      std::fill(S3m.begin(), S3m.end(), kZero);
      int64_t ie = 0, iT = 0, i3T = 0;
      std::array<C, 8> cD, c3;
      for (int64_t r = 1; r <= Rcut; ++r) {
        if (cop) { ie = (ie + step_e) % cq; iT = (iT + step_T) % ca; }
        i3T = (i3T + step_3T) % ca;
        const R lnr = log(R(r));
        C cur = R(tau[static_cast<size_t>(r)]) * exp((Lz.w[0] - p.v) * lnr);
        const R hl = R(Lz.h) * lnr;
        const C stp(cos(hl), sin(hl));
        // Taylor coefficients (2 pi i x)^j / j!; the n-, m-powers of
        // x = brn/(amq) (companion: brn/(am)) live in the rows, the rest here
        const R tD = twopi * R(p.b * r) / (R(ca) * R(q));
        const R t3c = twopi * R(p.b * r) / R(ca);
        cD[0] = kOne;
        c3[0] = kOne;
        for (int j = 1; j < KP; ++j) {
          cD[static_cast<size_t>(j)] = cD[static_cast<size_t>(j - 1)] * C(R(0), tD / R(j));
          c3[static_cast<size_t>(j)] = c3[static_cast<size_t>(j - 1)] * C(R(0), t3c / R(j));
        }
        const int64_t iem = cop ? (cq - ie) % cq : 0;
        const int64_t iTm = cop ? (ca - iT) % ca : 0;
        const int64_t i3Tm = (ca - i3T) % ca;
        // The branch with G^{+}(1-s-z) (SDp/S3p) carries the Mellin closure
        // of e(-x): Taylor coefficients (-2 pi i x)^j / j!, i.e. the
        // conjugates of cD/c3; the mirror branch takes cD/c3 themselves.
        for (int k = 0; k < K; ++k) {
          if (cop) {
            C vp = Lnq[static_cast<size_t>(k)][static_cast<size_t>(ie)];
            C vm = Lnq[static_cast<size_t>(k)][static_cast<size_t>(iem)];
            for (int j = 0; j < KP; ++j) {
              const auto& row = Ln[static_cast<size_t>(j)][static_cast<size_t>(k)];
              vp -= cconj(cD[static_cast<size_t>(j)]) * row[static_cast<size_t>(iT)];
              vm -= cD[static_cast<size_t>(j)] * row[static_cast<size_t>(iTm)];
            }
            SDp[k] += cur * vp;
            SDm[k] += cur * vm;
          }
          C wp = An[0][static_cast<size_t>(k)][0];
          C wm = wp;
          for (int j = 0; j < KP; ++j) {
            const auto& row = An[static_cast<size_t>(j)][static_cast<size_t>(k)];
            wp -= cconj(c3[static_cast<size_t>(j)]) * row[static_cast<size_t>(i3T)];
            wm -= c3[static_cast<size_t>(j)] * row[static_cast<size_t>(i3Tm)];
          }
          S3p[k] += cur * wp;
          S3m[k] += cur * wm;
          cur *= stp;
        }
      }
      const R lnm = log(R(m));
      C dD = kZero, d3 = kZero;
      for (int k = 0; k < K; ++k) {
        const C mpow = exp(-(p.u + Lz.w[k]) * lnm);  // m^{-(u+z_k)}
        if (cop) dD += prefD[k] * mpow * (Gp[k] * SDp[k] + Gm[k] * SDm[k]);
        d3 += pref3[k] * mpow * (Gp[k] * S3p[k] + Gm[k] * S3m[k]);
      }
      vrec += dD;
      v3 += d3;
      if (m == M) {
        last_rec += tod(abs(dD));
        last_t3 += tod(abs(d3));
      }
      if (m * q <= M) row_cache.emplace(m, std::move(Ln));
    }
  }

  // m-decay exponent: the remainder pass is the slower one, u - |Re z0|
  const double pm_exp = tod(p.u.real()) - (17.0 / 5.0 + KP - 0.5);
  rec.value = vrec;
  rec.err_estimate = tod(abs(vrec)) * 1e-9 + 3 * last_rec * M / (pm_exp - 1);
  rec.truncations = {{"m", M}, {"r", Rcut}};
  t3p.value = v3;
  t3p.err_estimate = tod(abs(v3)) * 1e-9 + 3 * last_t3 * M / (pm_exp - 1);
  t3p.truncations = {{"m", M}, {"r", Rcut}};
  const double sec = tm.lap();
  rec.seconds = sec / 2;
  t3p.seconds = sec / 2;
}

// ---------------------------------------------------------------------------
// Re w = 0: second Poisson stage of the main branch.  Expanding the n-sum of
// the reciprocity stage into classes nu mod am and applying the Hurwitz
// functional equation (sign tau), the nu-sum is a full additive-character sum
// and collapses to a congruence on n:
//
//  D_POISSON2 = sum_{pm, tau} \int_{(0)} Psi^{pm}(w) G^{-tau}(s-w)
//      q^{1-s+w} (b/a)^{-w} sum_{(m,q)=1} m^{-(u-w)} (am)^{s-w}
//      sum_r tau(r) r^{-(v+w)}
//      sum_{n == -pm tau qbar b r (am)} n^{-(s-w)}  dw / 2 pi i.
//
// Like the reciprocity line, the weight Psi cannot be trapezoided; it splits
// into its first k2() Gamma(w+z)-residues plus a remainder.
//
// Head: trapezoid on the short Re w = 0 grid (line_p0), against tau-class
// rows at v+w and n-class rows at s-w -- the class of n is a fixed multiple
// of r mod am, so the r-sum needs no truncation at all.
//
// Remainder: per Dirichlet term, all w-powers collect into X^w with
// X = qn/(br) = n/D, D = br/q, and the w-integral closes through the
// two-Gamma kernel on Re w' = Re(z) < 0 (see line_z2): with A = s + z and
// Y = X e^{i pi (tau - pm)/2},
//
//   \int G^{-pm}(w') G^{-tau}(A - w') X^{w'} dw'/2pi i
//     = (2 pi)^{-A} e^{-i pi tau A / 2}
//       [ Gamma(A) Y^A (1+Y)^{-A} - sum_{j<K} (-1)^j Gamma(A+j) Y^{-j}/j! ].
//
// For tau = pm the main term recombines with n^{-s} X^{-z} into
// D^z (n+D)^{-A}: an offset class row, a single Hurwitz zeta per term.  For
// tau = -pm, Y sits on the negative real axis (boundary value from the side
// fixed by the phase): n > D gives D^z (n-D)^{-A} with no extra phase,
// n < D gives D^z (D-n)^{-A} e^{-i pi pm A}, and n = D drops out (Re A < 0).
// The Taylor corrections are plain class rows at exponents s+z+j with an
// extra (-1)^j only in the tau = pm branch (from Y^{-j} = (-1)^j X^{-j}).
// On the z-line F supplies e^{-Im(z)^2} decay; every n-object is a continued
// zeta value, and the r-sum converges like tau(r) r^{-(v+s-1)} (the Hurwitz
// values grow like D^{1-A}).
// ---------------------------------------------------------------------------
const ChainEngine::Impl::Z2& ChainEngine::Impl::z2pre() {
  if (z2_) return *z2_;
  const WLine& Lz = line_z2();
  const int K = Lz.K, K2 = k2();
  auto z2 = std::make_unique<Z2>();
  z2->A.resize(K);
  z2->fb.resize(K);
  z2->gbP.resize(K);
  z2->gbM.resize(K);
  z2->p2A.resize(K);
  z2->etp.resize(K);
  z2->etm.resize(K);
  z2->eppA.resize(K);
  z2->epmA.resize(K);
  z2->zetaA.resize(K);
  z2->gamj.assign(static_cast<size_t>(K2), std::vector<C>(static_cast<size_t>(K)));
  const R facz = R(Lz.h) / (R(2) * const_pi<R>());
  const R hp = const_pi<R>() / R(2);
  for (int k = 0; k < K; ++k) {
    const C z = Lz.w[k];
    const C A = p.s + z;
    z2->A[k] = A;
    z2->fb[k] = facz * F(z) * exp(-z * phi.log_ba);
    z2->gbP[k] = G_pm(kOne - p.s - z, +1);
    z2->gbM[k] = G_pm(kOne - p.s - z, -1);
    z2->p2A[k] = exp(-A * const_log2pi<R>());
    z2->etp[k] = exp(C(R(0), -hp) * A);
    z2->etm[k] = exp(C(R(0), hp) * A);
    z2->eppA[k] = z2->etm[k] * z2->etm[k];
    z2->epmA[k] = z2->etp[k] * z2->etp[k];
    z2->zetaA[k] = riemann_zeta(A);
    z2->gamj[0][static_cast<size_t>(k)] = gamma_c(A);
    for (int j = 1; j < K2; ++j)
      z2->gamj[static_cast<size_t>(j)][static_cast<size_t>(k)] =
          z2->gamj[static_cast<size_t>(j - 1)][static_cast<size_t>(k)] * (A + cc(j - 1)) / R(j);
  }
  z2_ = std::move(z2);
  return *z2_;
}

void ChainEngine::Impl::sigma_pre() {
  if (!sg_nodes_.empty()) return;
  const WLine& Lz = line_z2();
  const Z2& Z = z2pre();
  const double hs = 0.1, Hs = 16.0;
  const int ns = static_cast<int>(Hs / hs);
  sg_nodes_.reserve(static_cast<size_t>(2 * ns + 1));
  sg_wt_.reserve(static_cast<size_t>(2 * ns + 1));
  const R wfac = R(hs) / (R(2) * const_pi<R>());
  for (int j = -ns; j <= ns; ++j) {
    const C sg(R(0.2), R(hs) * R(j));
    C zacc = kZero;
    for (int k = 0; k < Lz.K; ++k)
      zacc += Z.fb[k] * Z.p2A[k] * (Z.gbP[k] * Z.etp[k] + Z.gbM[k] * Z.etm[k]) *
              gamma_c(Lz.w[k] + sg);
    sg_nodes_.push_back(sg);
    sg_wt_.push_back(wfac * gamma_c(p.s - sg) * zacc);
  }
}

void ChainEngine::Impl::sigma_rows(int64_t c) {
  if (sg_cache_c_ == c) return;
  sg_cache_c_ = c;
  const R lnc = log(R(c));
  const size_t ns = sg_nodes_.size();
  sgH_.assign(ns, std::vector<C>(static_cast<size_t>(c)));
  sgN_.assign(ns, std::vector<C>(static_cast<size_t>(c)));
  for (size_t i = 0; i < ns; ++i) {
    const C x = p.v + sg_nodes_[i], y = p.s - sg_nodes_[i];
    const C cx = exp(-x * lnc), cy = exp(-y * lnc);
    for (int64_t al = 0; al < c; ++al) {
      const R fr = R(al == 0 ? c : al) / R(c);
      sgH_[i][static_cast<size_t>(al)] = cx * hurwitz_zeta(x, fr);
      sgN_[i][static_cast<size_t>(al)] = cy * hurwitz_zeta(y, fr);
    }
  }
}

C ChainEngine::Impl::ss_sigma(int64_t c, int64_t stepmul, const R& lsc, bool mulq) {
  sigma_pre();
  sigma_rows(c);
  const R lnq = log(R(p.q));
  C out = kZero;
  for (size_t i = 0; i < sg_nodes_.size(); ++i) {
    const C& sg = sg_nodes_[i];
    const auto& H = sgH_[i];
    const auto& N = sgN_[i];
    // tau = 1 * 1: the class of r is alpha beta, the class of n is
    // stepmul alpha beta, so pair every divisor-class product with the
    // matching n row.
    C W = kZero;
    for (int64_t al = 0; al < c; ++al) {
      const int64_t sa = (stepmul * al) % c;
      C inner = kZero;
      int64_t idx = 0;
      for (int64_t be = 0; be < c; ++be) {
        inner += H[static_cast<size_t>(be)] * N[static_cast<size_t>(idx)];
        idx += sa;
        if (idx >= c) idx -= c;
      }
      W += H[static_cast<size_t>(al)] * inner;
    }
    C t = sg_wt_[i] * exp(-sg * lsc) * W;
    if (mulq) t *= exp(-(p.s - sg) * lnq);
    out += t;
  }
  return out;
}

StageValue ChainEngine::Impl::tilde2() {
  Timer tm;
  const int64_t q = p.q, M = opt.m2_cut, Rcut = opt.r_cut;
  const int K2 = k2();
  const R lnq = log(R(q));
  const int sf = opt.flip_sigma_tilde2 ? -1 : +1;
  const auto& tau = SieveTables::shared().tau;
  C val = kZero;
  double last_m = 0;

  // ---- head: short-line trapezoid of the first K2 Psi-residues -----------
  const WLine& L = line_p0();
  const int KH = L.K;
  std::vector<C> qb(KH), gtp(KH), gtm(KH), coef(KH);
  {
    const R fac = R(L.h) / (R(2) * const_pi<R>());
    for (int k = 0; k < KH; ++k) {
      qb[k] = fac * exp((kOne - p.s + L.w[k]) * lnq - L.w[k] * phi.log_ba);
      gtp[k] = G_pm(p.s - L.w[k], -1);  // tau = +1
      gtm[k] = G_pm(p.s - L.w[k], +1);  // tau = -1
    }
  }

  // ---- remainder precomputations -----------------------------------------
  const WLine& Lz = line_z2();
  const Z2& Z = z2pre();
  const int KZ = Lz.K;
  const C q1s = exp((kOne - p.s) * lnq);

  std::vector<C> Ss_main(KZ), Sx_tail(KZ), Sx_small(KZ), Dz(KZ);
  std::vector<std::vector<C>> Ss_j(static_cast<size_t>(K2), std::vector<C>(KZ)),
      Sx_j(static_cast<size_t>(K2), std::vector<C>(KZ));
  std::vector<C> cmA(KZ);
  std::vector<R> Dpj(static_cast<size_t>(K2));

  for (int64_t m = 1; m <= M; ++m) {
    if (m % q == 0) continue;
    const int64_t ca = p.a * m;
    const R lnca = log(R(ca)), lnm = log(R(m));
    const int64_t e1 = ca > 1 ? md(inv_mod(q, ca) * (p.b % ca), ca) : 0;

    // head: the class of n is alpha(r) = -sf pm tau qbar b r mod am, so the
    // r-sum is the tau-class row paired with the n-row through a fixed
    // multiplier on the class index.
    {
      const auto& TR = tau_rows_p0(ca);
      const auto& NR = n_rows_p0(ca);
      for (int k = 0; k < KH; ++k)
        coef[k] = exp(-(p.u - L.w[k]) * lnm + (p.s - L.w[k]) * lnca);
      C dm = kZero;
      for (int pm : {+1, -1}) {
        const auto& ph = pm > 0 ? L.phip : L.phim;
        for (int tu : {+1, -1}) {
          const int64_t g = md(-static_cast<int64_t>(sf * pm * tu) * e1, ca);
          const auto& gt = tu > 0 ? gtp : gtm;
          for (int k = 0; k < KH; ++k) {
            const auto& tr = TR[static_cast<size_t>(k)];
            const auto& nr = NR[static_cast<size_t>(k)];
            C acc = kZero;
            int64_t idx = 0;
            for (int64_t rho = 0; rho < ca; ++rho) {
              acc += tr[static_cast<size_t>(rho)] * nr[static_cast<size_t>(idx)];
              idx += g;
              if (idx >= ca) idx -= ca;
            }
            dm += qb[k] * ph[k] * gt[k] * coef[k] * acc;
          }
        }
      }
      val += dm;
      last_m = tod(abs(dm));
      if (std::getenv("LAB_T2_DEBUG"))
        std::printf("t2 m=%lld head %+.15e %+.15e\n", (long long)m, tod(dm.real()),
                    tod(dm.imag()));
    }

    // remainder: matching-sign part exactly via the sigma line for small m
    // (larger m are damped by m^{-(u+|Re z|)} far below the tolerance);
    // mixed-sign parts by the truncated r-sum of offset-Hurwitz rows.
    const bool use_sg = m <= 6;
    {
      const auto& RT = rows_z2(ca);
      for (int k = 0; k < KZ; ++k) cmA[k] = exp(-Z.A[k] * lnca);
      for (auto& v : Ss_j) std::fill(v.begin(), v.end(), kZero);
      for (auto& v : Sx_j) std::fill(v.begin(), v.end(), kZero);
      std::fill(Ss_main.begin(), Ss_main.end(), kZero);
      std::fill(Sx_tail.begin(), Sx_tail.end(), kZero);
      std::fill(Sx_small.begin(), Sx_small.end(), kZero);
      const int64_t step_s = md(-static_cast<int64_t>(sf) * e1, ca);
      int64_t as = 0;
      for (int64_t r = 1; r <= Rcut; ++r) {
        as = (as + step_s) % ca;
        const int64_t ax = (ca - as) % ca;
        const int64_t Dnum = p.b * r;
        const R D = R(Dnum) / R(q);
        const R lnD = log(D);
        Dpj[0] = R(1);
        for (int j = 1; j < K2; ++j) Dpj[static_cast<size_t>(j)] = Dpj[static_cast<size_t>(j - 1)] * D;
        const C rvc = R(tau[static_cast<size_t>(r)]) * exp(-p.v * log(R(r)));
        C cur = exp(Lz.w[0] * lnD);
        const R hl = R(Lz.h) * lnD;
        const C stp(cos(hl), sin(hl));
        for (int k = 0; k < KZ; ++k) {
          const C t = rvc * cur;
          if (!use_sg) Ss_main[k] += t * cls_plus(Z.A[k], cmA[k], as, ca, D);
          auto mp = cls_minus(Z.A[k], cmA[k], ax, ca, D, Dnum, q);
          Sx_tail[k] += t * mp.first;
          Sx_small[k] += t * mp.second;
          for (int j = 0; j < K2; ++j) {
            const C tj = t * Dpj[static_cast<size_t>(j)];
            if (!use_sg)
              Ss_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                  tj * RT[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(as)];
            Sx_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                tj * RT[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(ax)];
          }
          cur *= stp;
        }
      }
      const C cstm = q1s * exp(p.s * lnca - p.u * lnm);
      C dm = kZero;
      for (int k = 0; k < KZ; ++k) {
        C core_s = use_sg ? kZero : Z.gamj[0][static_cast<size_t>(k)] * Ss_main[k];
        C core_x = Z.gamj[0][static_cast<size_t>(k)] * Sx_tail[k];
        const C core_xs = Z.gamj[0][static_cast<size_t>(k)] * Sx_small[k];
        for (int j = 0; j < K2; ++j) {
          const C& gj = Z.gamj[static_cast<size_t>(j)][static_cast<size_t>(k)];
          if (!use_sg)
            core_s -= (j % 2 ? -gj : gj) * Ss_j[static_cast<size_t>(j)][static_cast<size_t>(k)];
          core_x -= gj * Sx_j[static_cast<size_t>(j)][static_cast<size_t>(k)];
        }
        dm += Z.fb[k] * Z.p2A[k] *
              (Z.gbP[k] * Z.etp[k] * core_s + Z.gbM[k] * Z.etm[k] * core_s +
               Z.gbP[k] * Z.etm[k] * (core_x + Z.epmA[k] * core_xs) +
               Z.gbM[k] * Z.etp[k] * (core_x + Z.eppA[k] * core_xs));
      }
      if (use_sg) dm += ss_sigma(ca, step_s, log(R(p.b)) - lnq, false);
      val += cstm * dm;
      last_m += tod(abs(cstm * dm));
      if (std::getenv("LAB_T2_DEBUG"))
        std::printf("t2 m=%lld rem  %+.15e %+.15e\n", (long long)m, tod((cstm * dm).real()),
                    tod((cstm * dm).imag()));
    }
  }

  // polar term from the w = s crossing (see psi_sum_s)
  {
    C pol = kZero;
    for (int64_t m = 1; m <= M; ++m) {
      if (m % q == 0) continue;
      pol += exp(-(p.u - p.s) * log(R(m))) * polar_rsum(p.a * m, p.b);
    }
    pol = psi_sum_s() * R(q) * exp(-p.s * phi.log_ba) * pol;
    if (std::getenv("LAB_T2_DEBUG"))
      std::printf("t2 polar    %+.15e %+.15e\n", tod(pol.real()), tod(pol.imag()));
    val += pol;
  }

  StageValue sv;
  sv.value = val;
  const double pm_exp = tod(p.u.real()) - tod(p.s.real()) + 1;
  sv.err_estimate = tod(abs(val)) * 1e-9 + 3 * last_m * M / (pm_exp - 1);
  sv.truncations = {{"m", M}, {"r", Rcut}};
  sv.seconds = tm.lap();
  return sv;
}

// ---------------------------------------------------------------------------
// Second Poisson stage of the companion branch (modulus amq),
//
//  T3_POISSON2 = sum_{+-} sum_tau \int Psi^{+-}(w) G^{-tau}(s-w)
//      q^{2-s-u-2v} (b/a)^{-w} sum_m m^{-(u-w)} (amq)^{s-w-1}
//      sum_{nu mod amq, (nu,q)=1}
//        [sum_r tau(r) e(+- b r nu / am) r^{-(v+w)}]
//        [sum_n e(tau n nu / amq) n^{-(s-w)}] dw/2pi i.
//
// Detecting (nu, q) = 1 by inclusion-exclusion, the nu-sum is a full sum
// mod amq minus a full sum mod am, and each evaluates by orthogonality:
//
//  piece 1:  (amq)^{s-w}        sum_{n == -(+-)tau b r q (amq)} n^{-(s-w)}
//  piece 2: -(am)^{s-w} q^{s-w-1} sum_{n == -(+-)tau b r q (am)}  n^{-(s-w)}.
//
// Head / remainder split of Psi exactly as in tilde2().  In piece 1 the
// congruence forces q | n, so the head pairs tau-rows with n'-rows mod am
// (n = q n') through the class multiplier g1 = -(+-)tau b; piece 2 pairs the
// same rows through g2 = -(+-)tau b q.
//
// In the remainder both pieces share D = q b r (all w-powers collect to
// (n / qbr)^w).  Piece 2 is the generic offset-class situation handled by
// cls_plus / cls_minus with c = am and integer D.  Piece 1 is special: the
// kernel shifts n -> n -+ D land exactly on multiples of amq, so
//
//  same sign:  sum (n+D)^{-A} = (amq)^{-A} [zeta(A) - P(j0-1)],
//                               j0 = floor(br/am) + 1,
//  mixed tail: sum_{n>D} (n-D)^{-A} = (amq)^{-A} zeta(A),
//  mixed small: sum_{n<D} (D-n)^{-A} = (amq)^{-A} P(jlt),
//                               jlt = floor((qbr-1)/(amq)),
//
// with P(J) = sum_{j<=J} j^{-A} a prefix table (the n = D term vanishes since
// Re A < 0).  Taylor rows for piece 1 are q^{-(A+j)} times the mod-am rows.
// ---------------------------------------------------------------------------
StageValue ChainEngine::Impl::tilde3() {
  Timer tm;
  const int64_t q = p.q, M = opt.m2_cut, Rcut = opt.r_cut;
  const int K2 = k2();
  const R lnq = log(R(q));
  const C lead = powp(q, cc(2) - p.s - p.u - cc(2) * p.v);
  const auto& tau = SieveTables::shared().tau;
  C val = kZero;
  double last_m = 0;

  // ---- head: short-line trapezoid of the first K2 Psi-residues -----------
  const WLine& L = line_p0();
  const int KH = L.K;
  std::vector<C> qb(KH), gtp(KH), gtm(KH), qs1(KH), coef(KH);
  {
    const R fac = R(L.h) / (R(2) * const_pi<R>());
    for (int k = 0; k < KH; ++k) {
      qb[k] = fac * lead * exp(-L.w[k] * phi.log_ba);
      gtp[k] = G_pm(p.s - L.w[k], -1);  // tau = +1
      gtm[k] = G_pm(p.s - L.w[k], +1);  // tau = -1
      qs1[k] = exp((p.s - L.w[k] - kOne) * lnq);
    }
  }

  // ---- remainder precomputations -----------------------------------------
  const WLine& Lz = line_z2();
  const Z2& Z = z2pre();
  const int KZ = Lz.K;

  std::vector<C> S1s(KZ), S1x_tail(KZ), S1x_small(KZ);
  std::vector<C> S2s(KZ), S2x_tail(KZ), S2x_small(KZ);
  std::vector<std::vector<C>> S1s_j(static_cast<size_t>(K2), std::vector<C>(KZ)),
      S1x_j(static_cast<size_t>(K2), std::vector<C>(KZ)),
      S2s_j(static_cast<size_t>(K2), std::vector<C>(KZ)),
      S2x_j(static_cast<size_t>(K2), std::vector<C>(KZ));
  std::vector<C> cmA(KZ), cqA(KZ);
  std::vector<std::vector<C>> qmAj(static_cast<size_t>(K2), std::vector<C>(KZ));
  std::vector<R> Dpj(static_cast<size_t>(K2));
  std::vector<std::vector<C>> P;  // prefix sums of j^{-A} per node

  for (int64_t m = 1; m <= M; ++m) {
    const int64_t am = p.a * m;
    const R lnam = log(R(am)), lnm = log(R(m));
    const int64_t ebp = md(p.b, am);
    const int64_t ebq = md(p.b * (q % am), am);

    // head
    {
      const auto& TR = tau_rows_p0(am);
      const auto& NR = n_rows_p0(am);
      for (int k = 0; k < KH; ++k)
        coef[k] = exp(-(p.u - L.w[k]) * lnm + (p.s - L.w[k]) * lnam);
      C dm = kZero;
      for (int pm : {+1, -1}) {
        const auto& ph = pm > 0 ? L.phip : L.phim;
        for (int tu : {+1, -1}) {
          const int64_t g1 = pm * tu > 0 ? (am - ebp) % am : ebp;
          const int64_t g2 = pm * tu > 0 ? (am - ebq) % am : ebq;
          const auto& gt = tu > 0 ? gtp : gtm;
          for (int k = 0; k < KH; ++k) {
            const auto& tr = TR[static_cast<size_t>(k)];
            const auto& nr = NR[static_cast<size_t>(k)];
            C in1 = kZero, in2 = kZero;
            int64_t i1 = 0, i2 = 0;
            for (int64_t rho = 0; rho < am; ++rho) {
              in1 += tr[static_cast<size_t>(rho)] * nr[static_cast<size_t>(i1)];
              in2 += tr[static_cast<size_t>(rho)] * nr[static_cast<size_t>(i2)];
              i1 += g1; if (i1 >= am) i1 -= am;
              i2 += g2; if (i2 >= am) i2 -= am;
            }
            dm += qb[k] * ph[k] * gt[k] * coef[k] * (in1 - qs1[k] * in2);
          }
        }
      }
      val += dm;
      last_m = tod(abs(dm));
    }

    // remainder: matching-sign parts via the sigma line for small m, mixed
    // parts by the truncated r-sum (see tilde2)
    const bool use_sg = m <= 6;
    {
      const auto& RT = rows_z2(am);
      const R lnamq = lnam + lnq;
      for (int k = 0; k < KZ; ++k) {
        cmA[k] = exp(-Z.A[k] * lnam);
        cqA[k] = exp(-Z.A[k] * lnamq);
        C qj = exp(-Z.A[k] * lnq);
        const C qi = exp(C(-lnq, R(0)));
        for (int j = 0; j < K2; ++j) {
          qmAj[static_cast<size_t>(j)][static_cast<size_t>(k)] = qj;
          qj *= qi;
        }
      }
      const int64_t Jmax = (p.b * Rcut) / am;
      P.assign(static_cast<size_t>(KZ), std::vector<C>(static_cast<size_t>(Jmax + 1)));
      for (int k = 0; k < KZ; ++k) {
        P[static_cast<size_t>(k)][0] = kZero;
        for (int64_t j = 1; j <= Jmax; ++j)
          P[static_cast<size_t>(k)][static_cast<size_t>(j)] =
              P[static_cast<size_t>(k)][static_cast<size_t>(j - 1)] +
              exp(-Z.A[k] * log(R(j)));
      }
      for (auto* v : {&S1s, &S1x_tail, &S1x_small, &S2s, &S2x_tail, &S2x_small})
        std::fill(v->begin(), v->end(), kZero);
      for (auto* vv : {&S1s_j, &S1x_j, &S2s_j, &S2x_j})
        for (auto& v : *vv) std::fill(v.begin(), v.end(), kZero);
      for (int64_t r = 1; r <= Rcut; ++r) {
        const int64_t a1s = md(-p.b * r, am), a1x = (am - a1s) % am;
        const int64_t a2s = md(-p.b * r * (q % am), am), a2x = (am - a2s) % am;
        const int64_t Dnum = q * p.b * r;
        const R D = R(Dnum);
        const R lnD = log(D);
        const int64_t j0m1 = (p.b * r) / am, jlt = (Dnum - 1) / (am * q);
        Dpj[0] = R(1);
        for (int j = 1; j < K2; ++j) Dpj[static_cast<size_t>(j)] = Dpj[static_cast<size_t>(j - 1)] * D;
        const C rvc = R(tau[static_cast<size_t>(r)]) * exp(-p.v * log(R(r)));
        C cur = exp(Lz.w[0] * lnD);
        const R hl = R(Lz.h) * lnD;
        const C stp(cos(hl), sin(hl));
        for (int k = 0; k < KZ; ++k) {
          const C t = rvc * cur;
          const auto& Pk = P[static_cast<size_t>(k)];
          if (!use_sg) {
            S1s[k] += t * cqA[k] * (Z.zetaA[k] - Pk[static_cast<size_t>(j0m1)]);
            S2s[k] += t * cls_plus(Z.A[k], cmA[k], a2s, am, D);
          }
          S1x_tail[k] += t * cqA[k] * Z.zetaA[k];
          S1x_small[k] += t * cqA[k] * Pk[static_cast<size_t>(jlt)];
          auto mp = cls_minus(Z.A[k], cmA[k], a2x, am, D, Dnum, 1);
          S2x_tail[k] += t * mp.first;
          S2x_small[k] += t * mp.second;
          for (int j = 0; j < K2; ++j) {
            const C tj = t * Dpj[static_cast<size_t>(j)];
            const auto& rt = RT[static_cast<size_t>(j)][static_cast<size_t>(k)];
            const C& qmj = qmAj[static_cast<size_t>(j)][static_cast<size_t>(k)];
            if (!use_sg) {
              S1s_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                  tj * qmj * rt[static_cast<size_t>(a1s)];
              S2s_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                  tj * rt[static_cast<size_t>(a2s)];
            }
            S1x_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                tj * qmj * rt[static_cast<size_t>(a1x)];
            S2x_j[static_cast<size_t>(j)][static_cast<size_t>(k)] +=
                tj * rt[static_cast<size_t>(a2x)];
          }
          cur *= stp;
        }
      }
      const C c1m = lead * exp(p.s * lnamq - p.u * lnm);
      const C c2m = -lead * exp(p.s * lnam + (p.s - kOne) * lnq - p.u * lnm);
      C dm = kZero;
      for (int k = 0; k < KZ; ++k) {
        const size_t sk = static_cast<size_t>(k);
        C core_s = use_sg ? kZero : Z.gamj[0][sk] * (c1m * S1s[k] + c2m * S2s[k]);
        C core_x = Z.gamj[0][sk] * (c1m * S1x_tail[k] + c2m * S2x_tail[k]);
        const C core_xs = Z.gamj[0][sk] * (c1m * S1x_small[k] + c2m * S2x_small[k]);
        for (int j = 0; j < K2; ++j) {
          const size_t sj = static_cast<size_t>(j);
          const C& gj = Z.gamj[sj][sk];
          const C xjv = c1m * S1x_j[sj][sk] + c2m * S2x_j[sj][sk];
          if (!use_sg)
            core_s -= (j % 2 ? -gj : gj) * (c1m * S1s_j[sj][sk] + c2m * S2s_j[sj][sk]);
          core_x -= gj * xjv;
        }
        dm += Z.fb[k] * Z.p2A[k] *
              (Z.gbP[k] * Z.etp[k] * core_s + Z.gbM[k] * Z.etm[k] * core_s +
               Z.gbP[k] * Z.etm[k] * (core_x + Z.epmA[k] * core_xs) +
               Z.gbM[k] * Z.etp[k] * (core_x + Z.eppA[k] * core_xs));
      }
      if (use_sg) {
        const R lqb = lnq + log(R(p.b));
        const int64_t st1 = (am - ebp) % am, st2 = (am - ebq) % am;
        dm += c1m * ss_sigma(am, st1, lqb, true) + c2m * ss_sigma(am, st2, lqb, false);
      }
      val += dm;
      last_m += tod(abs(dm));
    }
  }

  // polar term from the w = s crossing; the (n,q) = 1 sieve leaves
  // [am | br] - (1/q)[am | brq] as the residue of the n-sum.
  {
    C pol = kZero;
    for (int64_t m = 1; m <= M; ++m)
      pol += exp(-(p.u - p.s) * log(R(m))) *
             (polar_rsum(p.a * m, p.b) - polar_rsum(p.a * m, p.b * q) / R(q));
    val += psi_sum_s() * lead * exp(-p.s * phi.log_ba) * pol;
  }

  StageValue sv;
  sv.value = val;
  const double pm_exp = tod(p.u.real()) - tod(p.s.real()) + 1;
  sv.err_estimate = tod(abs(val)) * 1e-9 + 3 * last_m * M / (pm_exp - 1);
  sv.truncations = {{"m", M}, {"r", Rcut}};
  sv.seconds = tm.lap();
  return sv;
}

// ---------------------------------------------------------------------------
// Re w = -4: Voronoi stage.  The r-sum of the combined second-Poisson object
// is opened with the Voronoi summation of tau; after collecting divisors the
// result is
//
//  TAST = sum_{+-} sum_{sigma,tau'} \int Phi^{+-}(w) G^{-sigma}(s-w)
//      G_f^{-tau'}(1-v-w) q^{1-s+w}
//      sum_{a1 a2 = a} sum_{b1 b2 = b} zeta^{(a2 b2 q)}(1+u-s)
//        a1^{s-1} a2^{s-2v-2w} b1^{-u} b2^{-w}
//      sum_{(m2,b2)=1} m2^{-(u-s+2v+2w)}
//      sum_{r,n} tau(r) S(+-tau' q b2bar r, sigma n, a2 m2)
//        n^{-(s-w)} r^{-(1-v-w)} dw/2pi i,
//
// with the Kloosterman sum opened as sum over x in (Z/a2 m2)^*, so that the
// r- and n-sums become additively twisted rows evaluated by class sums.
// ---------------------------------------------------------------------------
StageValue ChainEngine::Impl::tast() {
  Timer tm;
  const WLine& L = line_m4();
  const int K = L.K;
  const int64_t q = p.q, M2 = opt.mv_cut;
  const R lnq = log(R(q));
  const R fac = R(L.h) / (R(2) * const_pi<R>());
  // first-line factor per combo
  std::array<std::vector<C>, 8> f;
  {
    std::vector<C> gsp(K), gsm(K), gfp(K), gfm(K), qpw(K);
    for (int k = 0; k < K; ++k) {
      gsp[k] = G_pm(p.s - L.w[k], -1);
      gsm[k] = G_pm(p.s - L.w[k], +1);
      gfp[k] = Gf_pm(kOne - p.v - L.w[k], -1);
      gfm[k] = Gf_pm(kOne - p.v - L.w[k], +1);
      qpw[k] = exp((kOne - p.s + L.w[k]) * lnq);
    }
    for (int pm : {+1, -1})
      for (int sg : {+1, -1})
        for (int tu : {+1, -1}) {
          auto& v = f[static_cast<size_t>(combo(pm, sg, tu))];
          v.resize(K);
          const auto& ph = pm > 0 ? L.phip : L.phim;
          const auto& gs = sg > 0 ? gsp : gsm;
          const auto& gf = tu > 0 ? gfp : gfm;
          for (int k = 0; k < K; ++k) v[k] = fac * ph[k] * gs[k] * gf[k] * qpw[k];
        }
  }
  C val = kZero;
  std::vector<double> m2_abs(static_cast<size_t>(M2) + 1, 0.0);
  std::vector<C> powm2(K);
  for (int64_t a2 : divisors(p.a)) {
    const int64_t a1 = p.a / a2;
    const R lna2 = a2 > 1 ? log(R(a2)) : R(0);
    for (int64_t m2 = 1; m2 <= M2; ++m2) {
      const int64_t c2 = a2 * m2;
      const auto& rt = roots(c2);
      auto Zn = class_rows(c2, p.s, -1, L);
      auto Zr = class_rows(c2, kOne - p.v, -1, L);
      std::vector<std::vector<C>> En(static_cast<size_t>(K)), Er(static_cast<size_t>(K));
      for (int k = 0; k < K; ++k) {
        En[static_cast<size_t>(k)] = dft_naive(Zn[static_cast<size_t>(k)], rt);
        auto hat = dft_naive(Zr[static_cast<size_t>(k)], rt);
        std::vector<C> row(static_cast<size_t>(c2), kZero);
        for (int64_t d = 0; d < c2; ++d) {
          const C& zd = Zr[static_cast<size_t>(k)][static_cast<size_t>(d)];
          int64_t idx = 0;
          for (int64_t j = 0; j < c2; ++j) {
            row[static_cast<size_t>(j)] += zd * hat[static_cast<size_t>(idx)];
            idx += d;
            if (idx >= c2) idx -= c2;
          }
        }
        Er[static_cast<size_t>(k)] = std::move(row);
      }
      const auto& inv = invs(c2);
      std::vector<int64_t> xs;
      for (int64_t x = 0; x < c2; ++x)
        if (inv[static_cast<size_t>(x)] >= 0) xs.push_back(x);
      if (c2 == 1) xs.assign(1, 0);
      const R lnm2 = log(R(m2));
      for (int k = 0; k < K; ++k)
        powm2[k] = exp((p.s - cc(2) * p.v - R(2) * L.w[k]) * lna2 -
                       (p.u - p.s + cc(2) * p.v + R(2) * L.w[k]) * lnm2);
      for (int64_t b2 : divisors(p.b)) {
        if (gcd_i64(m2, b2) != 1) continue;
        const int64_t b1 = p.b / b2;
        const int64_t A0 = c2 == 1 ? 0 : md(q % c2 * inv_mod(b2, c2), c2);
        const C dec = zeta_removed(kOne + p.u - p.s, a2 * b2 * q) * powp(a1, p.s - kOne) *
                      powm(b1, p.u);
        std::vector<C> b2w(K);
        const R lnb2 = b2 > 1 ? log(R(b2)) : R(0);
        for (int k = 0; k < K; ++k) b2w[k] = exp(-L.w[k] * lnb2);
        // T[er][sigma][k]
        std::array<std::array<std::vector<C>, 2>, 2> T;
        for (int ei = 0; ei < 2; ++ei)
          for (int si = 0; si < 2; ++si) {
            auto& tv = T[static_cast<size_t>(ei)][static_cast<size_t>(si)];
            tv.assign(K, kZero);
            const int er = ei == 0 ? +1 : -1;
            const int sg = si == 0 ? +1 : -1;
            for (size_t xi = 0; xi < xs.size(); ++xi) {
              const int64_t ia = md(er * A0 * xs[xi], c2);
              const int64_t ib = md(sg * inv[static_cast<size_t>(xs[xi])], c2);
              for (int k = 0; k < K; ++k)
                tv[k] += Er[static_cast<size_t>(k)][static_cast<size_t>(ia)] *
                         En[static_cast<size_t>(k)][static_cast<size_t>(ib)];
            }
          }
        for (int pm : {+1, -1})
          for (int sg : {+1, -1})
            for (int tu : {+1, -1}) {
              const int er = pm * tu;
              const auto& fv = f[static_cast<size_t>(combo(pm, sg, tu))];
              const auto& tv = T[er > 0 ? 0 : 1][sg > 0 ? 0 : 1];
              C dm = kZero;
              for (int k = 0; k < K; ++k) dm += fv[k] * powm2[k] * b2w[k] * tv[k];
              dm *= dec;
              val += dm;
              m2_abs[static_cast<size_t>(m2)] += tod(abs(dm));
            }
      }
    }
  }
  StageValue sv;
  sv.value = val;
  const double pm_exp = tod(p.u.real()) - tod(p.s.real()) + 2 * tod(p.v.real()) - 8;
  sv.err_estimate = tod(abs(val)) * 1e-9 +
                    3 * m2_abs[static_cast<size_t>(M2)] * M2 / (pm_exp - 1);
  sv.truncations = {{"m2", M2}};
  sv.seconds = tm.lap();
  return sv;
}

// ---------------------------------------------------------------------------
// Final stage: the smooth Kloosterman-sum form
//
//  K = sum_{+-} sum_{sigma,tau'} q^{(3-s-u-2v)/2}
//      sum_{a1 a2 = a} sum_{b1 B3 B4 B2 = b} mu(B2) mu(B3)
//        a1^{s-1} a2^{u} zeta^{(a2 B2 B3 B4 q)}(1-s+u)
//        b1^{-u} B2^{-(s-u-1-2v)/2} B3^{-(1-v)} B4^{-(1-v)}
//      sum_{(r,B2)=1} sum_n tau(r B3 B4) n^{-(s+u-1+2v)/2} r^{-(1-s+u)/2}
//      sum_{B2 B3 a2 | m2} S(+-sigma tau' q r, B2 n, m2) / m2
//        Psi^{+-,sigma,tau'}(sqrt(q r B2 n)/m2),
//
// with Psi evaluated through its Mellin representation on Re w = 3/2
// (coefficients cpsi_k): the k-space accumulation turns the (r, n, m2) sums
// into Kloosterman-table contractions of two bucketed Dirichlet rows.
// ---------------------------------------------------------------------------
StageValue ChainEngine::Impl::final1() {
  Timer tm;
  const WLine& L = line_psik();
  if (!have_cpsi_k) { ensure_cpsi(L, cpsi_k); have_cpsi_k = true; }
  const int K = L.K;
  const int half = (K - 1) / 2;
  const int64_t q = p.q;
  const auto& tau = SieveTables::shared().tau;
  const C qpref = powp(q, (cc(3) - p.s - p.u - cc(2) * p.v) / R(2));
  const C xr = (kOne - p.s + p.u) / R(2);          // r-exponent
  const C xn = (p.s + p.u - kOne + cc(2) * p.v) / R(2);  // n-exponent
  C val = kZero;
  double last_m2 = 0;
  std::vector<C> Tp(K), Tm(K), qb2w(K);
  for (int64_t a2 : divisors(p.a)) {
    const int64_t a1 = p.a / a2;
    for (const auto& bb : fact4(p.b)) {
      const int64_t b1 = bb[0], B3 = bb[1], B4 = bb[2], B2 = bb[3];
      const int64_t D = B2 * B3 * a2;
      if (D > opt.mk_cut) continue;
      const C dfac = R(mu_of(B2) * mu_of(B3)) * powp(a1, p.s - kOne) * powp(a2, p.u) *
                     zeta_removed(kOne - p.s + p.u, a2 * B2 * B3 * B4 * q) * powm(b1, p.u) *
                     powm(B2, (p.s - p.u - kOne - cc(2) * p.v) / R(2)) *
                     powm(B3, kOne - p.v) * powm(B4, kOne - p.v);
      const R lnqB2 = log(R(q * B2));
      for (int k = 0; k < K; ++k) qb2w[k] = exp(-(L.w[k] / R(2)) * lnqB2);
      std::fill(Tp.begin(), Tp.end(), kZero);
      std::fill(Tm.begin(), Tm.end(), kZero);
      for (int64_t m2 = D; m2 <= opt.mk_cut; m2 += D) {
        const auto& S = kloosterman_table(m2);
        // bucketed rows
        std::vector<std::vector<C>> Rb(static_cast<size_t>(m2),
                                       std::vector<C>(static_cast<size_t>(K), kZero));
        std::vector<std::vector<C>> Nb(static_cast<size_t>(m2),
                                       std::vector<C>(static_cast<size_t>(K), kZero));
        for (int64_t r = 1; r <= opt.r_cut; ++r) {
          if (gcd_i64(r, B2) != 1) continue;
          const R wr(tau[static_cast<size_t>(r * B3 * B4)]);
          const R lnr = log(R(r));
          C cur = wr * exp(-(xr + L.w[0] / R(2)) * lnr);
          const R hl = R(L.h) / R(2) * lnr;
          const C step(cos(hl), -sin(hl));
          auto& row = Rb[static_cast<size_t>(r % m2)];
          for (int k = 0; k < K; ++k) { row[static_cast<size_t>(k)] += cur; cur *= step; }
        }
        for (int64_t n = 1; n <= opt.n_cut; ++n) {
          const R lnn = log(R(n));
          C cur = exp(-(xn + L.w[0] / R(2)) * lnn);
          const R hl = R(L.h) / R(2) * lnn;
          const C step(cos(hl), -sin(hl));
          auto& row = Nb[static_cast<size_t>(n % m2)];
          for (int k = 0; k < K; ++k) { row[static_cast<size_t>(k)] += cur; cur *= step; }
        }
        const R lnm2 = log(R(m2));
        const int kend = real_params ? half + 1 : K;
        double dmag = 0;
        for (int k = 0; k < kend; ++k) {
          C Cp = kZero, Cm = kZero;
          for (int64_t rho = 0; rho < m2; ++rho) {
            const auto& rrow = Rb[static_cast<size_t>(rho)];
            const int64_t ip = q % m2 * rho % m2;
            const auto& srp = S[static_cast<size_t>(ip)];
            const auto& srm = S[static_cast<size_t>((m2 - ip) % m2)];
            C yp = kZero, ym = kZero;
            int64_t sx = 0;
            const int64_t bstep = B2 % m2;
            for (int64_t nn = 0; nn < m2; ++nn) {
              const C& nv = Nb[static_cast<size_t>(nn)][static_cast<size_t>(k)];
              yp += R(srp[static_cast<size_t>(sx)]) * nv;
              ym += R(srm[static_cast<size_t>(sx)]) * nv;
              sx += bstep; if (sx >= m2) sx -= m2;
            }
            Cp += rrow[static_cast<size_t>(k)] * yp;
            Cm += rrow[static_cast<size_t>(k)] * ym;
          }
          const C mw = exp((L.w[k] - kOne) * lnm2);
          Tp[k] += mw * Cp;
          Tm[k] += mw * Cm;
          dmag += tod(abs(mw * Cp)) + tod(abs(mw * Cm));
        }
        if (m2 + D > opt.mk_cut) last_m2 += dmag;
      }
      if (real_params) {
        for (int k = 0; k < half; ++k) {
          Tp[K - 1 - k] = cconj(Tp[k]);
          Tm[K - 1 - k] = cconj(Tm[k]);
        }
      }
      for (int pm : {+1, -1})
        for (int sg : {+1, -1})
          for (int tu : {+1, -1}) {
            const int er = pm * sg * tu;
            const auto& cp = cpsi_k[static_cast<size_t>(combo(pm, sg, tu))];
            const auto& Tv = er > 0 ? Tp : Tm;
            C dm = kZero;
            for (int k = 0; k < K; ++k) dm += cp[k] * qb2w[k] * Tv[k];
            val += qpref * dfac * dm;
          }
    }
  }
  StageValue sv;
  sv.value = val;
  // crude m2-tail: scale of the last m2 slice times the Psi-row weight scale
  double wscale = 0;
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < K; ++k) wscale = std::max(wscale, tod(abs(cpsi_k[static_cast<size_t>(i)][k])));
  sv.err_estimate = tod(abs(val)) * 1e-8 + 10 * last_m2 * wscale * tod(abs(qpref));
  sv.truncations = {{"m2", opt.mk_cut}, {"r", opt.r_cut}, {"n", opt.n_cut}};
  sv.seconds = tm.lap();
  return sv;
}

// ---------------------------------------------------------------------------
// Polar terms at w = 1 - v.  The twisted divisor L-function has a double pole
// there with Laurent data (1/c, (2 gamma - 2 log c)/c) independent of the
// numerator; the residue of [smooth(w) * L(v+w)] is extracted from a small
// circle:  Res = c_1[smooth * c_{-2}-weight] + c_0[smooth * c_{-1}-weight].
// ---------------------------------------------------------------------------
C ChainEngine::Impl::residue(bool isP2, bool numeric, int64_t numerator,
                             double radius, int64_t dcut) {
  const int64_t q = p.q;
  const C w0 = kOne - p.v;
  const int N = opt.res_nodes;
  const R rho(radius);
  const R twog = R(2) * const_euler<R>();
  auto laurent = [&](int64_t cd) -> std::pair<C, C> {
    if (!numeric) return {kOne / R(cd), (twog - R(2) * log(R(cd))) / R(cd)};
    int64_t ne = numerator;
    while (gcd_i64(ne, cd) != 1) ++ne;
    auto key = std::make_pair(ne, cd);
    auto it = laurent_cache_.find(key);
    if (it == laurent_cache_.end()) {
      auto lv = estermann_laurent<cplx64>(ne, cd);
      it = laurent_cache_
               .emplace(key, std::make_pair(to_c<C>(lv.first), to_c<C>(lv.second)))
               .first;
    }
    return it->second;
  };
  std::vector<C> Aj(static_cast<size_t>(N)), Bj(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) {
    const C wj = w0 + rho * e_of<C>(R(j) / R(N));
    auto pr = phi.phi_pair(wj);
    const C phifac = pr.first + pr.second;
    const C gfac = G_pm(p.s - wj, -1) + G_pm(p.s - wj, +1);
    const C zf = riemann_zeta(p.s - wj);
    std::vector<C> pd1(static_cast<size_t>(dcut) + 1), pd2(static_cast<size_t>(dcut) + 1);
    for (int64_t d = 1; d <= dcut; ++d) {
      pd1[static_cast<size_t>(d)] = powm(d, p.u - wj);
      pd2[static_cast<size_t>(d)] = powm(d, p.u - p.s + kOne);
    }
    C S2 = kZero, S1 = kZero;
    for (const auto& aa : fact3(p.a)) {
      const int64_t al1 = aa[0], A1 = aa[1], A2 = aa[2];
      for (const auto& bbp : fact2(p.b)) {
        const int64_t be1 = bbp[0], be2 = bbp[1];
        const C zrem = zeta_removed(kOne + p.u - p.s, A1 * A2 * be2 * q);
        if (!isP2) {
          const C base = zrem * R(mu_of(A2)) * powp(A2, wj) * powm(be1, p.u) *
                         powm(be2, wj) * powm(al1 * A2, kOne - p.s);
          C dd2 = kZero, dd1 = kZero;
          for (int64_t d1 = 1; d1 <= dcut; ++d1) {
            if (gcd_i64(d1, q * A2 * be2) != 1) continue;
            for (int64_t d2 = 1; d2 <= dcut; ++d2) {
              if (gcd_i64(d2, q * A2 * be2) != 1) continue;
              auto lv = laurent(A1 * A2 * d1 * d2);
              const C wgt = R(mu_of(d2)) * pd1[static_cast<size_t>(d1)] *
                            pd2[static_cast<size_t>(d2)];
              dd2 += wgt * lv.first;
              dd1 += wgt * lv.second;
            }
          }
          S2 += base * dd2;
          S1 += base * dd1;
        } else {
          for (int64_t q2 : {int64_t(1), q}) {
            const int64_t q1 = q / q2;
            const int muq2 = q2 == 1 ? 1 : -1;
            const C base = zrem * R(mu_of(A2) * muq2) * powp(A1, wj) * powm(be1, p.u) *
                           powm(be2, wj) * powm(al1 * A2, kOne - p.s) *
                           powm(q1, p.s - wj - kOne);
            C dd2 = kZero, dd1 = kZero;
            for (int64_t d1 = 1; d1 <= dcut; ++d1) {
              if (gcd_i64(d1, A2 * be2 * q2) != 1) continue;
              for (int64_t d2 = 1; d2 <= dcut; ++d2) {
                if (gcd_i64(d2, A2 * be2) != 1) continue;
                auto lv = laurent(A1 * A2 * d1 * d2);
                const C wgt = R(mu_of(d2)) * pd1[static_cast<size_t>(d1)] *
                              pd2[static_cast<size_t>(d2)];
                dd2 += wgt * lv.first;
                dd1 += wgt * lv.second;
              }
            }
            S2 += base * dd2;
            S1 += base * dd1;
          }
        }
      }
    }
    const C lead = isP2 ? powp(q, kOne - wj - p.u - cc(2) * p.v)
                        : powp(q, kOne - p.s + wj);
    Aj[static_cast<size_t>(j)] = phifac * gfac * zf * lead * S2;
    Bj[static_cast<size_t>(j)] = phifac * gfac * zf * lead * S1;
  }
  C c1A = kZero, c0B = kZero;
  for (int j = 0; j < N; ++j) {
    c1A += Aj[static_cast<size_t>(j)] * e_of<C>(-R(j) / R(N));
    c0B += Bj[static_cast<size_t>(j)];
  }
  c1A /= R(N) * rho;
  c0B /= R(N);
  return c1A + c0B;
}

// ---------------------------------------------------------------------------
// ChainEngine
// ---------------------------------------------------------------------------

const char* stage_name(Stage st) {
  switch (st) {
    case Stage::D_CHARS: return "D_CHARS";
    case Stage::D_SERIES: return "D_SERIES";
    case Stage::D_POISSON: return "D_POISSON";
    case Stage::D_RECIP: return "D_RECIP";
    case Stage::D_POISSON2: return "D_POISSON2";
    case Stage::T3_SERIES: return "T3_SERIES";
    case Stage::T3_POISSON: return "T3_POISSON";
    case Stage::T3_POISSON2: return "T3_POISSON2";
    case Stage::COMBINED_VORONOI: return "COMBINED_VORONOI";
    case Stage::K_FINAL: return "K_FINAL";
  }
  return "?";
}

ChainEngine::ChainEngine(const ChainParams& pp, const ChainOptions& oo)
    : p_(pp), opt_(oo) {
  if (pp.a < 1 || pp.b < 1 || gcd_i64(pp.a, pp.b) != 1)
    throw std::invalid_argument("twists a, b must be positive coprime integers");
  const auto& sv = SieveTables::shared();
  if (!sv.sqfree[static_cast<size_t>(pp.a)] || !sv.sqfree[static_cast<size_t>(pp.b)])
    throw std::invalid_argument("twists a, b must be squarefree");
  if (pp.q < 5 || !is_prime_u64(static_cast<uint64_t>(pp.q)))
    throw std::invalid_argument("modulus q must be a prime >= 5");
  if (pp.a * pp.b % pp.q == 0)
    throw std::invalid_argument("twists must be coprime to the modulus");
  const double rs = tod(pp.s.real()), ru = tod(pp.u.real()), rv = tod(pp.v.real());
  const bool initial = rs > 2 && rs < 3 && rv > 2 && rv < 3 && ru > 10 && ru < 11;
  const bool extended = rs >= 0.5 && rs <= 3 && rv >= 0.5 && rv <= 3 && ru >= rs && ru <= 11;
  if (!initial && !extended)
    throw std::invalid_argument("(s, u, v) outside the admissible region");
  impl_ = std::make_unique<Impl>(pp, oo);
  impl_->initial_region = initial;
  impl_->real_params = pp.s.imag() == R(0) && pp.u.imag() == R(0) && pp.v.imag() == R(0);
}

ChainEngine::~ChainEngine() = default;

void ChainEngine::set_flip_sigma_tilde2(bool on) {
  if (opt_.flip_sigma_tilde2 == on) return;
  opt_.flip_sigma_tilde2 = on;
  impl_->opt.flip_sigma_tilde2 = on;
  memo_.erase(Stage::D_POISSON2);
}

const StageValue& ChainEngine::stage(Stage st) {
  auto it = memo_.find(st);
  if (it != memo_.end()) return it->second;
  if (!impl_->initial_region)
    throw std::domain_error("chain stages require (s, u, v) in the initial region");
  for (const auto& [name, re] : exponent_audit(st))
    if (re <= 1.02)
      throw std::domain_error(std::string("sum '") + name + "' of stage " + stage_name(st) +
                              " is not absolutely convergent at these parameters");
  StageValue v = compute(st);
  return memo_.emplace(st, std::move(v)).first->second;
}

StageValue ChainEngine::compute(Stage st) {
  switch (st) {
    case Stage::D_CHARS: return impl_->d_chars();
    case Stage::D_SERIES: return impl_->d_series();
    case Stage::D_POISSON: return impl_->d_poisson();
    case Stage::T3_SERIES: return impl_->t3_series();
    case Stage::D_RECIP:
    case Stage::T3_POISSON: {
      StageValue rec, t3p;
      impl_->pass_recip(rec, t3p);
      memo_.emplace(Stage::D_RECIP, rec);
      memo_.emplace(Stage::T3_POISSON, t3p);
      return st == Stage::D_RECIP ? rec : t3p;
    }
    case Stage::D_POISSON2: return impl_->tilde2();
    case Stage::T3_POISSON2: return impl_->tilde3();
    case Stage::COMBINED_VORONOI: {
      Timer tm;
      StageValue sv = impl_->tast();
      impl_->ensure_p12();
      sv.value += impl_->p1_cached + impl_->p2_cached;
      sv.truncations["d"] = opt_.d_cut;
      sv.seconds = tm.lap();
      return sv;
    }
    case Stage::K_FINAL: {
      Timer tm;
      StageValue sv = impl_->final1();
      impl_->ensure_p12();
      sv.value += impl_->p1_cached + impl_->p2_cached;
      sv.truncations["d"] = opt_.d_cut;
      sv.seconds = tm.lap();
      return sv;
    }
  }
  throw std::logic_error("unknown stage");
}

std::vector<std::pair<std::string, double>> ChainEngine::exponent_audit(Stage st) const {
  const double rs = tod(p_.s.real()), ru = tod(p_.u.real()), rv = tod(p_.v.real());
  std::vector<std::pair<std::string, double>> a;
  switch (st) {
    case Stage::D_CHARS:
    case Stage::D_SERIES:
      a = {{"n: s+z", rs}, {"m: u+z", ru}, {"r: v-z", rv}};
      break;
    case Stage::D_POISSON:
      a = {{"n: 1-s-z", 1 - rs + 4}, {"m: u+z", ru - 4}, {"r: v-z", rv + 4}};
      break;
    case Stage::T3_SERIES:
      a = {{"n: s+z", rs}, {"m: u+z", ru}, {"r: v-z", rv}};
      break;
    case Stage::D_RECIP:
    case Stage::T3_POISSON: {
      // p-part on Re w = 17/5 plus the remainder pass on Re z = -zA
      const double zA = 17.0 / 5.0 + opt_.phi_terms - 0.5;
      a = {{"n: 1-s+w", 1 - rs + 3.4},
           {"m: u-w", ru - 3.4},
           {"r: v+w", rv + 3.4},
           {"n: 1-s-z-j", 1 - rs + zA - (opt_.phi_terms - 1)},
           {"m: u+z", ru - zA},
           {"r: v-z-j", rv + zA - (opt_.phi_terms - 1)}};
      break;
    }
    case Stage::D_POISSON2:
    case Stage::T3_POISSON2:
      a = {{"n: s-w", rs}, {"m: u-s+1", ru - rs + 1}, {"r: v+w", rv}};
      break;
    case Stage::COMBINED_VORONOI:
      a = {{"n: s-w", rs + 4},
           {"r: 1-v-w", 1 - rv + 4},
           {"m2: u-s+2v+2w", ru - rs + 2 * rv - 8},
           {"d1: u+v-1", ru + rv - 1},
           {"d2: u-s+1", ru - rs + 1}};
      break;
    case Stage::K_FINAL:
      a = {{"n: (s+u-1+2v)/2+w/2", (rs + ru - 1 + 2 * rv) / 2 + 0.75},
           {"r: (1-s+u)/2+w/2", (1 - rs + ru) / 2 + 0.75},
           {"m2: Psi small-x decay", 7.5},
           {"d1: u+v-1", ru + rv - 1},
           {"d2: u-s+1", ru - rs + 1}};
      break;
  }
  return a;
}

ChainReport ChainEngine::chain_verify(double tol) {
  Timer tm;
  ChainReport rep;
  rep.a = p_.a;
  rep.b = p_.b;
  rep.q = p_.q;
  rep.s = to_cplx64(p_.s);
  rep.u = to_cplx64(p_.u);
  rep.v = to_cplx64(p_.v);
  const Stage order[] = {Stage::D_CHARS,    Stage::D_SERIES,    Stage::D_POISSON,
                         Stage::D_RECIP,    Stage::D_POISSON2,  Stage::T3_SERIES,
                         Stage::T3_POISSON, Stage::T3_POISSON2, Stage::COMBINED_VORONOI,
                         Stage::K_FINAL};
  for (Stage st : order) {
    if (opt_.budget_seconds > 0 && tm.lap() > opt_.budget_seconds)
      throw budget_exhausted(std::string("budget exhausted before stage ") + stage_name(st));
    rep.stages.emplace_back(stage_name(st), stage(st));
  }
  auto link = [&](const std::string& name, const C& lhs, const C& rhs) {
    LinkCheck lc;
    lc.name = name;
    lc.lhs = lhs;
    lc.rhs = rhs;
    const R denom = std::max(abs(lhs), abs(rhs));
    lc.residual = denom > R(0) ? tod(abs(lhs - rhs) / denom) : 0.0;
    rep.links.push_back(lc);
  };
  auto v = [&](Stage st) { return stage(st).value; };
  link("D_CHARS<->D_SERIES", v(Stage::D_CHARS), v(Stage::D_SERIES));
  link("D_SERIES<->D_POISSON", v(Stage::D_SERIES), v(Stage::D_POISSON));
  link("D_POISSON<->D_RECIP", v(Stage::D_POISSON), v(Stage::D_RECIP));
  link("D_RECIP<->D_POISSON2", v(Stage::D_RECIP), v(Stage::D_POISSON2));
  link("T3_SERIES<->T3_POISSON", v(Stage::T3_SERIES), v(Stage::T3_POISSON));
  link("T3_POISSON<->T3_POISSON2", v(Stage::T3_POISSON), v(Stage::T3_POISSON2));
  link("D_POISSON2+T3_POISSON2<->COMBINED_VORONOI",
       v(Stage::D_POISSON2) + v(Stage::T3_POISSON2), v(Stage::COMBINED_VORONOI));
  link("COMBINED_VORONOI<->K_FINAL", v(Stage::COMBINED_VORONOI), v(Stage::K_FINAL));
  const C D = v(Stage::D_RECIP) + v(Stage::T3_SERIES);
  const C Kf = v(Stage::K_FINAL);
  rep.grand_residual = tod(abs(D - Kf) / std::max(abs(D), abs(Kf)));
  rep.pass = rep.grand_residual < tol;
  for (const auto& lc : rep.links) rep.pass = rep.pass && lc.residual < tol;
  rep.seconds = tm.lap();
  return rep;
}

cplx128 ChainEngine::residue_P1(bool laurent_numeric, int64_t numerator, double radius,
                                int64_t d_cut) {
  if (radius <= 0) radius = opt_.res_radius;
  if (d_cut <= 0) d_cut = laurent_numeric ? 4 : opt_.d_cut;
  return impl_->residue(false, laurent_numeric, numerator, radius, d_cut);
}

cplx128 ChainEngine::residue_P2(bool laurent_numeric, int64_t numerator, double radius,
                                int64_t d_cut) {
  if (radius <= 0) radius = opt_.res_radius;
  if (d_cut <= 0) d_cut = laurent_numeric ? 4 : opt_.d_cut;
  return impl_->residue(true, laurent_numeric, numerator, radius, d_cut);
}

// Correction polynomial of the trivial-character term,
//   P_q(z) = (1 - q^{-(s+z)})(1 - q^{-(u+z)})(1 - 2 q^{-(v-z)} + q^{-(2v-2z)})
//          + q^{1-s-v} (2 - q^{-(v-z)})(1 - q^{-(u+z)})
//          + q^{2-s-u-2v} - q^{1-u-2v+z}.
cplx128 ChainEngine::pq_poly(const cplx128& z) const {
  const ChainParams& p = p_;
  const C qs = powm(p.q, p.s + z), qu = powm(p.q, p.u + z), qv = powm(p.q, p.v - z);
  return (kOne - qs) * (kOne - qu) * (kOne - cc(2) * qv + qv * qv) +
         powp(p.q, kOne - p.s - p.v) * (cc(2) - qv) * (kOne - qu) +
         powp(p.q, cc(2) - p.s - p.u - cc(2) * p.v) -
         powp(p.q, kOne - p.u - cc(2) * p.v + z);
}

cplx128 ChainEngine::trivial_term() {
  auto node = [&](const C& z) -> C {
    const C zv = riemann_zeta(p_.v - z);
    return riemann_zeta(p_.s + z) * riemann_zeta(p_.u + z) * zv * zv * pq_poly(z) *
           impl_->F(z);
  };
  return integrate_vertical<C>(node, R(0), R(opt_.z_tol), R(opt_.z_height));
}

// ---------------------------------------------------------------------------
// Eisenstein spectral weight
// ---------------------------------------------------------------------------

// Mellin factors of the two Bessel kernels on the Theta row (Re w = -1/4):
//   int_0^inf J^-(x,t) x^{-w} dx/x = cosh(pi t)(2pi)^w Gamma(-w/2+it)Gamma(-w/2-it),
//   int_0^inf J^+(x,t) x^{-w} dx/x = (pi i/sinh(pi t))(2pi)^w (1/2)
//       [Gamma(it-w/2)/Gamma(it+w/2+1) - Gamma(-it-w/2)/Gamma(-it+w/2+1)].
namespace {
std::vector<C> mellin_row(const WLine& L, int eps, const R& t) {
  const R pi = const_pi<R>();
  const C it(R(0), t);
  std::vector<C> M(static_cast<size_t>(L.K));
  for (int k = 0; k < L.K; ++k) {
    const C w = L.w[k];
    const C mw2 = -w / R(2);
    const C tp = exp(w * const_log2pi<R>());  // (2 pi)^w
    if (eps < 0) {
      M[static_cast<size_t>(k)] = cosh(pi * t) * tp * gamma_c(mw2 + it) * gamma_c(mw2 - it);
    } else {
      const C br = exp(lgamma_c(it + mw2) - lgamma_c(it - mw2 + kOne)) -
                   exp(lgamma_c(-it + mw2) - lgamma_c(-it - mw2 + kOne));
      M[static_cast<size_t>(k)] = C(R(0), pi) / sinh(pi * t) * tp * br / R(2);
    }
  }
  return M;
}
}  // namespace

cplx128 ChainEngine::lpsi(int pm, int sigma, int tau, int eps, const real128& t) {
  const WLine& L = impl_->line_psith();
  if (!impl_->have_cpsi_th) {
    impl_->ensure_cpsi(L, impl_->cpsi_th);
    impl_->have_cpsi_th = true;
  }
  auto M = mellin_row(L, eps, t);
  const auto& cp = impl_->cpsi_th[static_cast<size_t>(Impl::combo(pm, sigma, tau))];
  C acc = kZero;
  for (int k = 0; k < L.K; ++k) acc += cp[k] * M[static_cast<size_t>(k)];
  return acc;
}

cplx64 ChainEngine::theta_eis(double td) {
  const ChainParams& p = p_;
  R t(std::abs(td) < 1e-6 ? (td < 0 ? -1e-6 : 1e-6) : td);
  const WLine& L = impl_->line_psith();
  if (!impl_->have_cpsi_th) {
    impl_->ensure_cpsi(L, impl_->cpsi_th);
    impl_->have_cpsi_th = true;
  }
  auto Mp = mellin_row(L, +1, t);
  auto Mm = mellin_row(L, -1, t);
  C lp = kZero;
  for (int pm : {+1, -1})
    for (int sg : {+1, -1})
      for (int tu : {+1, -1}) {
        const auto& cp = impl_->cpsi_th[static_cast<size_t>(Impl::combo(pm, sg, tu))];
        const auto& M = (pm * sg * tu) > 0 ? Mp : Mm;
        for (int k = 0; k < L.K; ++k) lp += cp[k] * M[static_cast<size_t>(k)];
      }
  const C it1(R(0), t);
  const C x1 = (kOne - p.s + p.u) / R(2);
  const C xx1 = kOne - p.s + p.u;
  const C x2 = (p.s + p.u - kOne + cc(2) * p.v) / R(2);
  const C qfac = (C(eta_quad(p.q, t), R(0)) - R(2) * powm(p.q, x1)) / (kOne - powm(p.q, xx1));
  const C za(kOne + C(R(0), R(2) * t)), zb(kOne - C(R(0), R(2) * t));
  const C zeta_a = riemann_zeta(za), zeta_b = riemann_zeta(zb);
  const C qpref = powp(p.q, (cc(3) - p.s - p.u - cc(2) * p.v) / R(2));
  C acc = kZero;
  for (int64_t a2 : divisors(p.a)) {
    const int64_t a1 = p.a / a2;
    for (const auto& bb : fact4(p.b)) {
      const int64_t b1d = bb[0], B3 = bb[1], B4 = bb[2], B2 = bb[3];
      const int64_t N = B3 * a2, BN = B2 * N;
      const C pref = qpref * R(mu_of(B2) * mu_of(B3)) * powp(a1, p.s - kOne) *
                     powp(a2, p.u) * powm(b1d, p.u) *
                     powm(B2, (p.s - p.u - kOne - cc(2) * p.v) / R(2)) *
                     powm(B3, kOne - p.v) * powm(B4, kOne - p.v);
      // 1/|zeta^{(BN)}(1+2it)|^2 * zeta_BN(1+2it) zeta_BN(1-2it)
      C zrem_a = zeta_a, zrem_b = zeta_b, zloc = kOne;
      for (int64_t pr : prime_factors(BN)) {
        const C fa = kOne - powm(pr, za), fb = kOne - powm(pr, zb);
        zrem_a *= fa;
        zrem_b *= fb;
        zloc /= fa * fb;
      }
      const C combo = zloc / (zrem_a * zrem_b);
      // 1 / (zeta_{a2 B3 B4 q}(1-s+u) L_{B2}(x1+it) L_{B2}(x1-it))
      C lf = kOne;
      for (int64_t pr : prime_factors(a2 * B3 * B4 * p.q)) lf *= kOne - powm(pr, xx1);
      for (int64_t pr : prime_factors(B2)) {
        const C pa = powm(pr, x1 + it1), pb = powm(pr, x1 - it1);
        lf *= (kOne - R(2) * pa + pa * pa) * (kOne - R(2) * pb + pb * pb);
      }
      C inner = kZero;
      for (int64_t vv : divisors(N)) {
        const int64_t Nv = N / vv;
        for (int64_t bb1 : divisors(vv))
          for (int64_t bb2 : divisors(vv))
            for (int64_t g1 : divisors(Nv))
              for (int64_t g2 : divisors(Nv)) {
                const int m1 = mu_of(bb1 * g1) != 0 && gcd_i64(bb1, g1) == 1
                                   ? mu_of(bb1) * mu_of(g1)
                                   : 0;
                const int m2i = mu_of(bb2 * g2) != 0 && gcd_i64(bb2, g2) == 1
                                    ? mu_of(bb2) * mu_of(g2)
                                    : 0;
                if (m1 == 0 || m2i == 0) continue;
                const C midp = R(m1 * m2i) * R(bb1 * bb2) / (R(vv) * R(BN)) *
                               exp(it1 * log(R(bb1 * g2) / R(bb2 * g1)));
                C dsum = kZero;
                for (const auto& dd : fact3(B2)) {
                  const int64_t d1 = dd[0], b0 = dd[1], d2 = dd[2];
                  if (mu_of(d1 * d2) == 0 || gcd_i64(d1, d2) != 1) continue;
                  dsum += R(mu_of(d1 * d2)) * eta_quad(b0, t) / R(d1 * b0) *
                          powm(bb1 * g1, x1) * powm(bb2 * g2 * d1 * d2, x2);
                }
                C pprod = kOne;
                for (int64_t pr : prime_factors(bb1 * g1 * B3 * B4))
                  pprod *= (cc(2) - eta_quad(pr, t) * powm(pr, x1)) / (kOne - powm(pr, xx1));
                inner += midp * dsum * pprod;
              }
      }
      acc += pref * combo * lf * inner;
    }
  }
  return to_cplx64(qfac * lp * acc);
}

// ---------------------------------------------------------------------------
// Finite rearrangement identities
// ---------------------------------------------------------------------------

double eisenstein_rearrangement_check(int64_t B2, int64_t b2pp, int64_t g2pp,
                                      int64_t n, double t) {
  if (B2 < 1 || !SieveTables::shared().sqfree[static_cast<size_t>(B2)])
    throw std::invalid_argument("B2 must be squarefree");
  if (n % (b2pp * g2pp) != 0)
    throw std::invalid_argument("b2'' g2'' must divide n");
  const int64_t nstar = n / (b2pp * g2pp);
  cplxd lhs{0, 0};
  for (int64_t v1 : divisors(B2))
    for (int64_t b2p : divisors(v1))
      for (int64_t g2p : divisors(B2 / v1)) {
        if (mu_of(b2p * g2p) == 0 || gcd_i64(b2p, g2p) != 1) continue;
        const int64_t den = b2p * b2pp * g2p * g2pp;
        if ((B2 * n) % den != 0) continue;
        const double th = t * std::log(double(g2p) / double(b2p));
        lhs += (1.0 / double(v1)) * double(mu_of(b2p) * mu_of(g2p)) * double(b2p) *
               cplxd(std::cos(th), std::sin(th)) * eta_divisor(B2 * n / den, -t);
      }
  cplxd rhs{0, 0};
  for (int64_t d1 : divisors(B2))
    for (int64_t b0 : divisors(B2 / d1)) {
      const int64_t d2 = B2 / (d1 * b0);
      if (mu_of(d1 * d2) == 0 || gcd_i64(d1, d2) != 1) continue;
      if (nstar % (d1 * d2) != 0) continue;
      rhs += double(mu_of(d1) * mu_of(d2)) / double(d1 * b0) * eta_divisor(b0, -t) *
             eta_divisor(nstar / (d1 * d2), -t);
    }
  return std::abs(lhs - rhs);
}

double rsum_identity_check(int64_t B, int64_t B2, int64_t q, cplx64 z, double t,
                           int64_t r_cut) {
  const auto& sv = SieveTables::shared();
  if (r_cut > sv.limit) r_cut = sv.limit;
  if (!sv.sqfree[static_cast<size_t>(B)] || gcd_i64(B, q) != 1 || gcd_i64(B2, B * q) != 1)
    throw std::invalid_argument("need B squarefree, (B,q) = (B2, Bq) = 1");
  const auto pB = prime_factors(B);
  auto eta_d = [](int64_t pp, int e, double tt) -> double {
    const double th = tt * std::log(double(pp));
    if (std::abs(th) < 1e-12) return double(e + 1);
    return std::sin((e + 1) * th) / std::sin(th);
  };
  cplxd lhs{0, 0}, sr{0, 0};
  for (int64_t r = 1; r <= r_cut; ++r) {
    if (gcd_i64(r, B2) != 1) continue;
    // factor r
    int64_t x = r;
    double eta_qr = 1.0, eta_r = 1.0;
    int64_t tau_rB = 1, tau_r = 1;
    int eq = 1;  // exponent of q in qr
    bool sawq = false;
    while (x > 1) {
      const int64_t pp = sv.spf[static_cast<size_t>(x)];
      int e = 0;
      while (x % pp == 0) { x /= pp; ++e; }
      tau_r *= e + 1;
      eta_r *= eta_d(pp, e, t);
      const bool inB = std::find(pB.begin(), pB.end(), pp) != pB.end();
      tau_rB *= inB ? e + 2 : e + 1;
      if (pp == q) { eq += e; sawq = true; }
      else eta_qr *= eta_d(pp, e, t);
    }
    (void)sawq;
    eta_qr *= eta_d(q, eq, t);
    for (int64_t pp : pB)
      if (r % pp != 0) tau_rB *= 2;
    const cplxd rp = std::exp(-z * std::log(double(r)));
    lhs += double(tau_rB) * eta_qr * rp;
    sr += double(tau_r) * eta_r * rp;
  }
  const cplxd qz = std::exp(-z * std::log(double(q)));
  cplxd rhs = (eta_d(q, 1, t) - 2.0 * qz) / (1.0 - qz * qz) * sr;
  for (int64_t pp : pB) {
    const cplxd pz = std::exp(-z * std::log(double(pp)));
    rhs *= (2.0 - eta_d(pp, 1, t) * pz) / (1.0 - pz * pz);
  }
  return std::abs(lhs - rhs) / std::abs(lhs);
}

}  // namespace lab
