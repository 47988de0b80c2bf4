// Unit tests for the contour layer: the test function F, panel quadrature,
// and the transform Phi^{+-} with its dual (residue + straight line)
// representation.  Reference values were computed independently with
// mpmath 1.3.0 at 40 digits and frozen here.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "lab/contour.hpp"

using namespace lab;
using std::abs;

namespace {
const cplx64 kS(2.5, 0), kU(10.5, 0), kV(2.5, 0);

double rel_err(cplx64 got, cplx64 want) { return abs(got - want) / abs(want); }
}  // namespace

TEST_CASE("test function F: frozen references, parity, prescribed zeros") {
  TestFunctionF<cplx64> F{kS, kU, kV};
  CHECK(rel_err(F(cplx64(0.3, 0.1)),
                {8.02932426323902678415846e+123, -7.61376069693663506647758e+123}) < 1e-11);
  CHECK(rel_err(F(cplx64(1.2, 0)), {1.784274767061480168899934e+124, 0}) < 1e-11);
  CHECK(rel_err(F(cplx64(0, 2.5)), {8.249708003686436298257819e+127, 0}) < 1e-11);
  // even
  for (double x : {0.7, 1.9}) {
    cplx64 z(x, 0.4);
    CHECK(abs(F(z) - F(-z)) <= 1e-12 * abs(F(z)));
  }
  // simple zeros at +-(j - s) and double zeros at +-(1-u), +-(v-1)
  CHECK(abs(F(cplx64(1.0, 0) - kS)) <= 1e-90 * abs(F(cplx64(1.1, 0) - kS)));
  CHECK(abs(F(cplx64(7.0, 0) - kS)) <= 1e-90 * abs(F(cplx64(1.1, 0) - kS)));
  CHECK(abs(F(cplx64(1, 0) - kU)) <= 1e-90 * abs(F(cplx64(1.1, 0) - kS)));
}

TEST_CASE("vertical-line quadrature: gaussian and Cahen-Mellin closed forms") {
  // int_{(0)} e^{z^2} dz / 2 pi i = 1 / (2 sqrt(pi))
  auto g = [](const cplx64& z) { return exp(z * z); };
  cplx64 got = integrate_vertical<cplx64>(g, 0.0, 1e-18, 30.0);
  CHECK(rel_err(got, {0.28209479177387814347, 0}) < 1e-13);
  // int_{(2)} Gamma(z) x^{-z} dz / 2 pi i = e^{-x}
  for (double x : {0.7, 2.3}) {
    auto m = [&](const cplx64& z) { return gamma_c(z) * rpow_ns<cplx64>(x, z); };
    cplx64 e = integrate_vertical<cplx64>(m, 2.0, 1e-18, 60.0);
    CHECK(rel_err(e, {std::exp(-x), 0}) < 1e-12);
  }
}

TEST_CASE("Phi against independent references, double and quad paths") {
  PhiContext<cplx64> ctx(kS, kU, kV, 2, 3);
  auto [pp, pm] = ctx.phi_pair(cplx64(1.0, 0.5));
  CHECK(rel_err(pp, {4.770366160212067590659e+124, 2.025414808325046255815e+124}) < 1e-11);
  CHECK(rel_err(pm, {-9.743212122519908239287e+124, 2.294773851262268801787e+125}) < 1e-11);
  // at Re w = 17/5 the vertical pieces sit at Re z = -4 and the integrand
  // cancels through ~e^{16}; the double path keeps only ~6 digits there
  auto [p2, m2] = ctx.phi_pair(cplx64(3.4, 1.7));
  CHECK(rel_err(p2, {-6.630239051773239847409e+122, 1.508610484476374835742e+123}) < 1e-5);
  CHECK(rel_err(m2, {-2.288501491078399566122e+125, 2.56628820754149800576e+125}) < 1e-5);

  // the quad path is the workhorse and recovers full accuracy
  PhiContext<cplx128> qctx(cplx128(2.5), cplx128(10.5), cplx128(2.5), 2, 3);
  cplx128 qp = qctx.phi(cplx128(1.0, 0.5), +1);
  CHECK(rel_err(to_cplx64(qp),
                {4.770366160212067590659e+124, 2.025414808325046255815e+124}) < 1e-13);
  cplx128 q2 = qctx.phi(cplx128(3.4, 1.7), +1);
  CHECK(rel_err(to_cplx64(q2),
                {-6.630239051773239847409e+122, 1.508610484476374835742e+123}) < 1e-13);
}

TEST_CASE("dual representation (K crossed poles + line) matches bent contour") {
  PhiContext<cplx128> ctx(cplx128(2.5), cplx128(10.5), cplx128(2.5), 2, 3);
  const cplx128 ws[] = {cplx128(3.4, 1.1), cplx128(0.0, 0.7), cplx128(-4.0, 0.9)};
  for (const auto& w : ws) {
    for (int sign : {+1, -1}) {
      cplx128 a = ctx.phi(w, sign);
      cplx128 b = ctx.phi_dual(w, sign, 2);
      CHECK(static_cast<double>(abs(a - b) / abs(a)) < 1e-9);
      // a third crossed pole must not change the value either
      cplx128 c = ctx.phi_dual(w, sign, 3);
      CHECK(static_cast<double>(abs(a - c) / abs(a)) < 1e-9);
    }
  }
}

TEST_CASE("sum over signs of Phi at w = s vanishes") {
  PhiContext<cplx64> ctx(kS, kU, kV, 2, 3);
  auto [pp, pm] = ctx.phi_pair(kS);
  CHECK(abs(pp + pm) <= 1e-9 * abs(pp));
  CHECK(abs(pp) > 0.0);  // the individual values are far from zero
}

TEST_CASE("Phi is holomorphic: mean-value property on a circle") {
  PhiContext<cplx64> ctx(kS, kU, kV, 2, 3);
  const cplx64 w0(0.8, -0.3);
  const double rho = 0.2;
  cplx64 mean(0);
  const int n = 16;
  for (int k = 0; k < n; ++k) {
    cplx64 w = w0 + rho * std::exp(cplx64(0, 2 * 3.14159265358979323846 * k / n));
    mean += ctx.phi(w, +1);
  }
  mean /= double(n);
  CHECK(rel_err(mean, ctx.phi(w0, +1)) < 1e-8);
}

TEST_CASE("Phi decays along the vertical line Re w = 17/5") {
  PhiContext<cplx64> ctx(kS, kU, kV, 2, 3);
  double a2 = abs(ctx.phi(cplx64(3.4, 2.0), +1));
  double a8 = abs(ctx.phi(cplx64(3.4, 8.0), +1));
  double a14 = abs(ctx.phi(cplx64(3.4, 14.0), +1));
  CHECK(a8 < a2);
  CHECK(a14 < a8);
}
