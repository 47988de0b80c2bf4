// ---------------------------------------------------------------------------
// contour.hpp -- complex-contour machinery:
//   * the even entire test function F(z) with prescribed zeros,
//   * Gauss-Legendre panel quadrature along segments, polylines and
//     vertical lines,
//   * the bent contour C(w) and the two-sided transform Phi^{+-}(w),
//   * the dual representation of Phi (crossed poles + straight line),
//     used as an independent cross-check of the bent-contour evaluation.
//
// Everything is templated on the complex type; quad precision (cplx128) is
// the workhorse for Phi at negative real part, where the bent-contour
// integrand cancels by many orders of magnitude.
// ---------------------------------------------------------------------------
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lab/prec.hpp"
#include "lab/specfun.hpp"

namespace lab {

// ---------------------------------------------------------------------------
// Test function
//
//   F(z) = e^{z^2} (z^2-(1-u)^2)^2 (z^2-(v-1)^2)^2 prod_{j=1}^{J} (z^2-(j-s)^2)
//
// Even, entire, rapidly decaying on vertical lines (|F| ~ e^{x^2-y^2} times a
// polynomial of degree 208).  The double zeros at +-(1-u), +-(v-1) and the
// simple zeros at +-(j-s) are what make the later contour shifts legal: they
// cancel would-be poles of the gamma factors and of zeta(v-z)^2.
// ---------------------------------------------------------------------------
template <class C>
struct TestFunctionF {
  C s, u, v;
  int J = 50;

  C operator()(const C& z) const {
    using R = scalar_of_t<C>;
    const C z2 = z * z;
    const C a1 = C(R(1)) - u, a2 = v - C(R(1));
    C p = exp(z2);
    const C f1 = z2 - a1 * a1, f2 = z2 - a2 * a2;
    p *= f1 * f1 * f2 * f2;
    for (int j = 1; j <= J; ++j) {
      const C rj = C(R(j)) - s;
      p *= z2 - rj * rj;
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Quadrature primitives
// ---------------------------------------------------------------------------

// One 32-point Gauss-Legendre panel for \int_{z0}^{z1} f(z) dz.
template <class C, class Fn>
C gl_panel(Fn&& f, const C& z0, const C& z1) {
  using R = scalar_of_t<C>;
  const auto& xs = GL32<R>::nodes();
  const auto& ws = GL32<R>::weights();
  const C mid = (z0 + z1) / R(2), half = (z1 - z0) / R(2);
  C acc(R(0));
  for (int k = 0; k < 32; ++k) acc += C(ws[k]) * f(mid + half * C(xs[k]));
  return acc * half;
}

// \int_{z0}^{z1} f dz with n panels graded geometrically (ratio 2) so that the
// smallest panel sits at the `toward_z1` end; resolves a nearby singularity.
template <class C, class Fn>
C graded_segment(Fn&& f, const C& z0, const C& z1, int n, bool toward_z1) {
  using R = scalar_of_t<C>;
  C acc(R(0));
  R denom = R((int64_t(1) << n) - 1);
  R t_prev(0);
  for (int k = 1; k <= n; ++k) {
    // breakpoints t_k = (2^k - 1) / (2^n - 1), largest panels first
    R t = R((int64_t(1) << k) - 1) / denom;
    R u0 = toward_z1 ? R(1) - t : t_prev;
    R u1 = toward_z1 ? R(1) - t_prev : t;
    acc += gl_panel(f, z0 + (z1 - z0) * u0, z0 + (z1 - z0) * u1);
    t_prev = t;
  }
  return acc;
}

// \int f dz over [z0, z1] in panels of length <= hmax.
template <class C, class Fn>
C uniform_segment(Fn&& f, const C& z0, const C& z1, scalar_of_t<C> hmax) {
  using R = scalar_of_t<C>;
  int n = std::max(1, static_cast<int>(std::ceil(static_cast<double>(abs(z1 - z0) / hmax))));
  C acc(R(0));
  for (int k = 0; k < n; ++k)
    acc += gl_panel(f, z0 + (z1 - z0) * (R(k) / R(n)), z0 + (z1 - z0) * (R(k + 1) / R(n)));
  return acc;
}

// \int_{(c)} g(w) dw / 2 pi i over the vertical line Re w = c.  Unit-height
// panels are added symmetrically outward until two consecutive panel pairs
// fall below rel_tol times the accumulated scale (or max_height is reached).
template <class C, class Fn>
C integrate_vertical(Fn&& g, scalar_of_t<C> c, scalar_of_t<C> rel_tol,
                     scalar_of_t<C> max_height) {
  using R = scalar_of_t<C>;
  const C i1(R(0), R(1));
  C acc(R(0));
  R scale(0);
  int quiet = 0;
  for (int k = 0; R(k) < max_height; ++k) {
    C up = gl_panel(g, C(c, R(k)), C(c, R(k + 1)));
    C dn = gl_panel(g, C(c, R(-k - 1)), C(c, R(-k)));
    acc += up + dn;
    R mag = abs(up) + abs(dn);
    if (mag > scale) scale = mag;
    quiet = (mag < rel_tol * scale) ? quiet + 1 : 0;
    if (quiet >= 2) break;
  }
  // acc is \int g dw along the line; divide by 2 pi i
  return acc / (R(2) * const_pi<R>() * i1);
}

// ---------------------------------------------------------------------------
// The transform Phi^{+-}
//
//   Phi^{+-}(w) = (2 pi)^{s-w-1} e^{+- i pi (w+1-s)/2}
//                   \int_{C(w)} F(z) (b/a)^{-z} Gamma(w+z) Gamma(1-s-z) dz/2pi i
//
// with the bent contour
//
//   C(w) = (-3/5-w-i inf, -3/5-w-i] u [-3/5-w-i, 1/10-w]
//            u [1/10-w, -3/5-w+i] u [-3/5-w+i, -3/5-w+i inf).
//
// Written in the shifted variable zeta = z + w the knee of the contour is
// fixed near zeta = 0 and dodges the n = 0 pole of Gamma(zeta); the n >= 1
// poles stay left of the verticals, and the poles of Gamma(1-s-z) at
// z = j - s, 1 <= j <= J, are cancelled by zeros of F.  Hence the same
// contour works for every w we need.
//
// The two signs share the contour integral; only the outer phase differs.
// ---------------------------------------------------------------------------
template <class C>
struct PhiContext {
  using R = scalar_of_t<C>;

  C s;
  R log_ba;             // log(b/a)
  TestFunctionF<C> F;
  int knee_panels = 9;  // graded panels per knee segment

  PhiContext(const C& s_, const C& u_, const C& v_, int64_t a, int64_t b)
      : s(s_), log_ba(log(R(b) / R(a))), F{s_, u_, v_} {}

  // integrand of the z-integral, as a function of z
  C integrand(const C& w, const C& z) const {
    return F(z) * exp(-z * log_ba) * gamma_c(w + z) * gamma_c(C(R(1)) - s - z);
  }

  // Quadrature node on the fixed contour C, in the shifted variable
  // zeta = z + w: position, weight (including dz) and the cached value
  // Gamma(zeta), which does not depend on w.
  struct Node {
    C zeta, wt, gam;
  };

  // \int_{C(w)} ... dz / 2 pi i  (no outer phase / power)
  C bent_integral(const C& w) const {
    const C i1(R(0), R(1));
    // |e^{z^2}| = e^{x^2 - y^2} peaks at Im z = 0, i.e. at offset Im w above
    // the knee; the knee region near zeta = 0 is the other mass center.
    // Extend each ray far enough to cover both.
    const double x = std::abs(static_cast<double>(w.real()) + 0.6);
    const double reach = std::sqrt(x * x + 130.0) + 1.0;
    const double wi = static_cast<double>(w.imag());
    const int nup = static_cast<int>(std::ceil(reach + std::max(0.0, wi))) - 3;
    const int ndn = static_cast<int>(std::ceil(reach + std::max(0.0, -wi))) - 3;
    ensure_core();
    ensure_tail(up_, +1, nup);
    ensure_tail(dn_, -1, ndn);
    C acc(R(0));
    auto add = [&](const std::vector<Node>& ns, size_t count) {
      for (size_t k = 0; k < count; ++k) {
        const Node& nd = ns[k];
        const C z = nd.zeta - w;
        acc += nd.wt * nd.gam * F(z) * exp(-z * log_ba)
             * gamma_c(C(R(1)) - s - z);
      }
    };
    add(core_, core_.size());
    add(up_, size_t(32) * nup);
    add(dn_, size_t(32) * ndn);
    return acc / (R(2) * const_pi<R>() * i1);
  }

  // outer factor (2 pi)^{s-w-1} e^{+- i pi (w+1-s)/2}
  C prefactor(const C& w, int sign) const {
    const R pi = const_pi<R>();
    C ph = C(R(0), R(sign) * pi / R(2)) * (w + C(R(1)) - s);
    return exp((s - w - C(R(1))) * const_log2pi<R>() + ph);
  }

  C phi(const C& w, int sign) const { return prefactor(w, sign) * bent_integral(w); }

  // both signs at once (shared integral)
  std::pair<C, C> phi_pair(const C& w) const {
    C I = bent_integral(w);
    return {prefactor(w, +1) * I, prefactor(w, -1) * I};
  }

  // residue of the bent representation at z = -w - n:
  //   p_n(w) = ((-1)^n / n!) (2 pi)^{s-w-1} e^{+- i pi(w+1-s)/2}
  //              F(-w-n) (b/a)^{w+n} Gamma(1-s+w+n)
  C p_n(const C& w, int n, int sign) const {
    R fact(1);
    for (int k = 2; k <= n; ++k) fact *= R(k);
    R par = (n % 2 == 0) ? R(1) : R(-1);
    return prefactor(w, sign) * (par / fact) * F(-w - C(R(n)))
         * exp((w + C(R(n))) * log_ba) * gamma_c(C(R(1)) - s + w + C(R(n)));
  }

  // dual representation: straighten C(w) and push it left past the first K
  // poles of Gamma(w+z), to the vertical line Re z = -Re w - K + 1/2.
  C phi_dual(const C& w, int sign, int K) const {
    C acc(R(0));
    for (int n = 0; n < K; ++n) acc += p_n(w, n, sign);
    const R x0 = -w.real() - R(K) + R(1) / R(2);
    auto f = [&](const C& z) { return integrand(w, z); };
    const double xd = std::abs(static_cast<double>(x0));
    const double yl = std::sqrt(xd * xd + 130.0) + std::abs(static_cast<double>(w.imag())) + 2.0;
    const C i1(R(0), R(1));
    C line = uniform_segment(f, C(x0) - i1 * R(yl), C(x0) + i1 * R(yl), R(1) / R(2));
    return acc + prefactor(w, sign) * line / (R(2) * const_pi<R>() * i1);
  }

 private:
  // cached quadrature nodes (with Gamma(zeta)) for the fixed contour C
  mutable std::vector<Node> core_, up_, dn_;

  void emit_panel(std::vector<Node>& out, const C& z0, const C& z1) const {
    const auto& xs = GL32<R>::nodes();
    const auto& ws = GL32<R>::weights();
    const C mid = (z0 + z1) / R(2), half = (z1 - z0) / R(2);
    for (int k = 0; k < 32; ++k) {
      C zeta = mid + half * C(xs[k]);
      out.push_back({zeta, C(ws[k]) * half, gamma_c(zeta)});
    }
  }

  void emit_graded(std::vector<Node>& out, const C& z0, const C& z1, int n,
                   bool toward_z1) const {
    R denom = R((int64_t(1) << n) - 1);
    R t_prev(0);
    for (int k = 1; k <= n; ++k) {
      R t = R((int64_t(1) << k) - 1) / denom;
      R u0 = toward_z1 ? R(1) - t : t_prev;
      R u1 = toward_z1 ? R(1) - t_prev : t;
      emit_panel(out, z0 + (z1 - z0) * u0, z0 + (z1 - z0) * u1);
      t_prev = t;
    }
  }

  void ensure_core() const {
    if (!core_.empty()) return;
    const C i1(R(0), R(1));
    const C base(R(-3) / R(5)), knee(R(1) / R(10));
    // [-3/5-3i, -3/5-i] in half panels, upward
    for (int k = 0; k < 4; ++k)
      emit_panel(core_, base - i1 * (R(3) - R(k) / R(2)),
                 base - i1 * (R(3) - R(k + 1) / R(2)));
    // knee, graded toward the vertex (the Gamma(zeta) pole sits ~0.08 away)
    emit_graded(core_, base - i1, knee, knee_panels, true);
    emit_graded(core_, knee, base + i1, knee_panels, false);
    // [-3/5+i, -3/5+3i]
    for (int k = 0; k < 4; ++k)
      emit_panel(core_, base + i1 * (R(1) + R(k) / R(2)),
                 base + i1 * (R(1) + R(k + 1) / R(2)));
  }

  void ensure_tail(std::vector<Node>& t, int dir, int n) const {
    const C i1(R(0), R(1));
    const C base(R(-3) / R(5));
    int have = static_cast<int>(t.size() / 32);
    for (int k = have; k < n; ++k) {
      if (dir > 0)
        emit_panel(t, base + i1 * R(3 + k), base + i1 * R(4 + k));
      else
        emit_panel(t, base - i1 * R(4 + k), base - i1 * R(3 + k));
    }
  }
};

}  // namespace lab
