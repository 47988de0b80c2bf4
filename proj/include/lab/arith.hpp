// ---------------------------------------------------------------------------
// arith.hpp -- integer / character-sum layer:
//   linear sieve tables (spf, mu, tau, tau3, squarefree),
//   deterministic Miller-Rabin, Dirichlet characters mod a prime q via a
//   primitive root and a discrete-log table, Gauss / Kloosterman / Ramanujan
//   sums, the GL(3) divisor coefficients A(n,m), and the divisor-type
//   eigenvalue eta(n,t) = sum_{d1 d2 = n} (d1/d2)^{it}.
// ---------------------------------------------------------------------------
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace lab {

using cplxd = std::complex<double>;

int64_t gcd_i64(int64_t a, int64_t b);
int64_t mul_mod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t pow_mod_u64(uint64_t b, uint64_t e, uint64_t m);
bool is_prime_u64(uint64_t n);

std::vector<int64_t> divisors(int64_t n);

// Linear sieve tables up to `limit` (inclusive).
struct SieveTables {
  int64_t limit = 0;
  std::vector<int32_t> spf;        // smallest prime factor, spf[1] = 1
  std::vector<int8_t>  mu;         // Moebius
  std::vector<int8_t>  sqfree;     // 1 if squarefree
  std::vector<int32_t> tau;        // number of divisors
  std::vector<int32_t> tau3;       // ternary divisor function

  explicit SieveTables(int64_t limit = 1000000);
  // global shared instance (default limit), built on first use
  static const SieveTables& shared();
};

// Dirichlet characters modulo a prime q >= 3.
// chi_j(g^k) = e(jk/(q-1)) where g is the smallest primitive root mod q.
struct PrimeModulus {
  int64_t q = 0;
  int64_t g = 0;                   // smallest primitive root
  std::vector<int32_t> dlog;       // dlog[a] for a in 1..q-1; dlog[g^k]=k

  explicit PrimeModulus(int64_t q);

  int64_t order() const { return q - 1; }
  int64_t conj_index(int64_t j) const { return ((q - 1 - j) % (q - 1) + (q - 1)) % (q - 1); }
  bool is_primitive(int64_t j) const { return j % (q - 1) != 0; }
  // chi_j(a); zero if q | a
  cplxd char_value(int64_t j, int64_t a) const;
  // sum_{j mod q-1} chi_j(a) conj(chi_j(b))  (= (q-1)[a = b mod q] for (ab,q)=1)
  cplxd orthogonality_sum(int64_t a, int64_t b) const;
  // tau(chi_j) = sum_{a mod q} chi_j(a) e(a/q)
  cplxd gauss_sum(int64_t j) const;
};

// Kloosterman sum S(m, n, c) = sum_{(x,c)=1} e((mx + n xbar)/c); exact real value.
double kloosterman_sum(int64_t m, int64_t n, int64_t c);
// Full table S(x, y, c) for all residues x, y mod c (memoized across calls).
const std::vector<std::vector<double>>& kloosterman_table(int64_t c);

// Ramanujan sum r_c(n) = sum_{d | (c,n)} d mu(c/d)
int64_t ramanujan_sum(int64_t c, int64_t n);

// A(n, m) = sum_{d | (n,m)} mu(d) tau3(n/d) tau3(m/d)
int64_t gl3_coefficient(int64_t n, int64_t m);

// eta(n, t) = sum_{d1 d2 = n} (d1/d2)^{it}; eta(n,0) = tau(n).
cplxd eta_divisor(int64_t n, double t);          // by divisor enumeration
cplxd eta_multiplicative(int64_t n, double t);   // by Euler-product local factors

// tau(nm) = sum_{d | (n,m)} mu(d) tau(n/d) tau(m/d)
bool hecke_tau_relation_check(int64_t n, int64_t m);

// Selberg identity S(m, n, c) = sum_{d | (m,n,c)} d S(mn/d^2, 1, c/d)
double selberg_identity_residual(int64_t m, int64_t n, int64_t c);

// Weil bound |S(m,n,c)| <= tau(c) gcd(m,n,c)^{1/2} c^{1/2}
bool weil_bound_ok(int64_t m, int64_t n, int64_t c);

// Twisted multiplicativity, (beta2, q alpha2 m) = 1:
//   S(A r, sgn beta2 n, beta2 alpha2 m) = r_{beta2}(r) S(A r beta2bar, sgn n, alpha2 m)
// with A coprime to beta2.  Returns |lhs - rhs|.
double twisted_multiplicativity_residual(int64_t A, int64_t r, int64_t n,
                                         int64_t beta2, int64_t c);

}  // namespace lab
