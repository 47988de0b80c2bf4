// Unit tests for the integer / character-sum layer.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lab/arith.hpp"

using namespace lab;

TEST_CASE("miller-rabin") {
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(3));
  CHECK(is_prime_u64(100003));
  CHECK(is_prime_u64(1009));
  CHECK(!is_prime_u64(1));
  CHECK(!is_prime_u64(100001));
  CHECK(!is_prime_u64(3215031751ull));  // strong pseudoprime to bases 2,3,5,7
  CHECK(is_prime_u64(18446744073709551557ull));
}

TEST_CASE("sieve tables vs direct counts") {
  const auto& t = SieveTables::shared();
  CHECK(t.tau[12] == 6);
  CHECK(t.tau3[4] == 6);    // tau3(p^2) = 6
  CHECK(t.tau3[12] == 18);  // tau3(2^2 * 3) = 6*3
  CHECK(t.mu[30] == -1);
  CHECK(t.mu[12] == 0);
  CHECK(t.sqfree[30] == 1);
  CHECK(t.sqfree[12] == 0);
  // spot-check tau by enumeration
  for (int64_t n : {1, 97, 360, 1024, 999983, 1000000})
    CHECK(t.tau[static_cast<size_t>(n)] == static_cast<int32_t>(divisors(n).size()));
}

TEST_CASE("primitive roots and discrete logs") {
  PrimeModulus m5(5), m7(7), m11(11), m13(13);
  CHECK(m5.g == 2);
  CHECK(m7.g == 3);
  CHECK(m11.g == 2);
  CHECK(m13.g == 2);
  CHECK(m13.dlog[1] == 0);
  CHECK(m13.dlog[2] == 1);
  CHECK(m13.dlog[4] == 2);
}

TEST_CASE("character orthogonality sum_chi chi(a) conj(chi(b)) = (q-1)[a=b]") {
  for (int64_t q : {5, 7, 11, 13}) {
    PrimeModulus pm(q);
    for (int64_t a = 1; a < q; ++a)
      for (int64_t b = 1; b < q; ++b) {
        cplxd s = pm.orthogonality_sum(a, b);
        double want = (a == b) ? double(q - 1) : 0.0;
        CHECK(std::abs(s - cplxd{want, 0}) < 1e-10);
      }
  }
}

TEST_CASE("gauss sums: |tau(chi)|^2 = q; quadratic cases") {
  for (int64_t q : {5, 7, 11, 13}) {
    PrimeModulus pm(q);
    for (int64_t j = 1; j < q - 1; ++j)
      CHECK(std::abs(std::norm(pm.gauss_sum(j)) - double(q)) < 1e-9);
  }
  // q=5, quadratic character (j = 2): tau = sqrt(5)
  PrimeModulus m5(5);
  CHECK(std::abs(m5.gauss_sum(2) - cplxd{std::sqrt(5.0), 0}) < 1e-10);
  // q=3, the only nontrivial character: tau = i sqrt(3)
  PrimeModulus m3(3);
  CHECK(std::abs(m3.gauss_sum(1) - cplxd{0, std::sqrt(3.0)}) < 1e-10);
}

TEST_CASE("kloosterman sums: pinned values and table consistency") {
  CHECK(kloosterman_sum(1, 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kloosterman_sum(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-12));
  for (int64_t c : {2, 3, 5, 12, 35}) {
    const auto& tab = kloosterman_table(c);
    for (int64_t x = 0; x < c; ++x)
      for (int64_t y = 0; y < c; ++y)
        CHECK(std::abs(tab[x][y] - kloosterman_sum(x, y, c)) < 1e-9);
  }
}

TEST_CASE("ramanujan sums vs brute force, c <= 200") {
  const double kPi = 3.14159265358979323846;
  std::mt19937 rng(7);
  for (int64_t c = 1; c <= 200; c += (c < 40 ? 1 : 7)) {
    for (int rep = 0; rep < 4; ++rep) {
      int64_t n = 1 + int64_t(rng() % 500);
      double direct = 0;
      for (int64_t x = 1; x <= c; ++x)
        if (gcd_i64(x, c) == 1) direct += std::cos(2 * kPi * double(x % c) * double(n % c) / double(c));
      CHECK(std::abs(direct - double(ramanujan_sum(c, n))) < 1e-7);
    }
  }
  CHECK(ramanujan_sum(4, 2) == -2);
}

TEST_CASE("gl3 coefficients") {
  CHECK(gl3_coefficient(2, 1) == 3);
  CHECK(gl3_coefficient(2, 2) == 8);
  CHECK(gl3_coefficient(1, 1) == 1);
  // symmetry
  std::mt19937 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    int64_t n = 1 + rng() % 400, m = 1 + rng() % 400;
    CHECK(gl3_coefficient(n, m) == gl3_coefficient(m, n));
  }
}

TEST_CASE("eta(n, t): divisor route vs multiplicative route; eta(n,0)=tau(n)") {
  const auto& tb = SieveTables::shared();
  std::mt19937 rng(13);
  for (int rep = 0; rep < 300; ++rep) {
    int64_t n = 1 + rng() % 10000;
    double t = (double(rng() % 20001) / 1000.0) - 10.0;
    cplxd a = eta_divisor(n, t);
    cplxd b = eta_multiplicative(n, t);
    CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
  }
  for (int64_t n : {1, 2, 6, 36, 720}) {
    CHECK(std::abs(eta_divisor(n, 0.0) - cplxd{double(tb.tau[size_t(n)]), 0}) < 1e-12);
  }
}

TEST_CASE("hecke relation for tau") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    int64_t n = 1 + rng() % 900, m = 1 + rng() % 900;
    CHECK(hecke_tau_relation_check(n, m));
  }
}

TEST_CASE("selberg identity and weil bound over random triples") {
  std::mt19937 rng(19);
  for (int rep = 0; rep < 500; ++rep) {
    int64_t c = 1 + rng() % 200;
    int64_t m = 1 + rng() % 1000, n = 1 + rng() % 1000;
    CHECK(selberg_identity_residual(m, n, c) < 1e-6 * std::max<double>(1.0, c));
    CHECK(weil_bound_ok(m, n, c));
  }
}

TEST_CASE("twisted multiplicativity of kloosterman sums") {
  std::mt19937 rng(23);
  int done = 0;
  while (done < 200) {
    int64_t beta2 = 2 + rng() % 12;
    int64_t c = 1 + rng() % 60;
    int64_t q = 5 + rng() % 20;
    if (gcd_i64(beta2, c) != 1 || gcd_i64(beta2, q) != 1) continue;
    if (!SieveTables::shared().sqfree[size_t(beta2)]) continue;
    int64_t r = 1 + rng() % 50, n = 1 + rng() % 50;
    double res = twisted_multiplicativity_residual(q, r, n, beta2, c);
    CHECK(res < 1e-6 * double(beta2 * c));
    ++done;
  }
}
