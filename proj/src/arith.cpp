#include "lab/arith.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lab {

static const double kPi = 3.14159265358979323846264338327950288;

int64_t gcd_i64(int64_t a, int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) { int64_t t = a % b; a = b; b = t; }
  return a;
}

int64_t mul_mod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<int64_t>(static_cast<uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m));
}

uint64_t pow_mod_u64(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<uint64_t>(mul_mod_u64(b, r, m));
    b = static_cast<uint64_t>(mul_mod_u64(b, b, m));
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  // deterministic witness set for all 64-bit inputs
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = pow_mod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = static_cast<uint64_t>(mul_mod_u64(x, x, n));
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<int64_t> divisors(int64_t n) {
  std::vector<int64_t> small, large;
  for (int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
  return small;
}

// ---------------------------------------------------------------------------
// linear sieve
// ---------------------------------------------------------------------------
SieveTables::SieveTables(int64_t lim) : limit(lim) {
  size_t n = static_cast<size_t>(lim) + 1;
  spf.assign(n, 0);
  mu.assign(n, 0);
  sqfree.assign(n, 0);
  tau.assign(n, 0);
  tau3.assign(n, 0);
  // pe[i] = exponent of spf[i] in i; helper for multiplicative recurrences
  std::vector<int32_t> pe(n, 0);
  std::vector<int32_t> primes;
  if (lim >= 1) {
    spf[1] = 1; mu[1] = 1; sqfree[1] = 1; tau[1] = 1; tau3[1] = 1; pe[1] = 0;
  }
  for (int64_t i = 2; i <= lim; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<int32_t>(i);
      primes.push_back(static_cast<int32_t>(i));
      mu[i] = -1; sqfree[i] = 1; tau[i] = 2; tau3[i] = 3; pe[i] = 1;
    }
    for (int32_t p : primes) {
      if (p > spf[i] || i * p > lim) break;
      int64_t ip = i * p;
      spf[ip] = p;
      if (p == spf[i]) {
        pe[ip] = pe[i] + 1;
        mu[ip] = 0;
        sqfree[ip] = 0;
        int e = pe[ip];
        int64_t rest = ip;
        for (int k = 0; k < e; ++k) rest /= p;
        tau[ip] = static_cast<int32_t>((e + 1) * (rest == 1 ? 1 : tau[rest]));
        tau3[ip] = static_cast<int32_t>(((e + 1) * (e + 2) / 2) * (rest == 1 ? 1 : tau3[rest]));
      } else {
        pe[ip] = 1;
        mu[ip] = static_cast<int8_t>(-mu[i]);
        sqfree[ip] = sqfree[i];
        tau[ip] = static_cast<int32_t>(2 * tau[i]);
        tau3[ip] = static_cast<int32_t>(3 * tau3[i]);
      }
    }
  }
}

const SieveTables& SieveTables::shared() {
  static const SieveTables t(1000000);
  return t;
}

// ---------------------------------------------------------------------------
// characters mod prime q
// ---------------------------------------------------------------------------
PrimeModulus::PrimeModulus(int64_t q_) : q(q_) {
  if (q < 3 || !is_prime_u64(static_cast<uint64_t>(q)))
    throw std::invalid_argument("PrimeModulus: q must be a prime >= 3");
  // smallest primitive root: g generates (Z/q)^* iff g^{(q-1)/p} != 1 for all p | q-1
  std::vector<int64_t> pf;
  int64_t m = q - 1;
  for (int64_t p = 2; p * p <= m; ++p)
    if (m % p == 0) { pf.push_back(p); while (m % p == 0) m /= p; }
  if (m > 1) pf.push_back(m);
  for (int64_t cand = 2; ; ++cand) {
    bool ok = true;
    for (int64_t p : pf)
      if (pow_mod_u64(static_cast<uint64_t>(cand), static_cast<uint64_t>((q - 1) / p),
                      static_cast<uint64_t>(q)) == 1) { ok = false; break; }
    if (ok) { g = cand; break; }
  }
  dlog.assign(static_cast<size_t>(q), -1);
  int64_t x = 1;
  for (int64_t k = 0; k < q - 1; ++k) {
    dlog[static_cast<size_t>(x)] = static_cast<int32_t>(k);
    x = mul_mod_u64(static_cast<uint64_t>(x), static_cast<uint64_t>(g), static_cast<uint64_t>(q));
  }
}

cplxd PrimeModulus::char_value(int64_t j, int64_t a) const {
  a %= q; if (a < 0) a += q;
  if (a == 0) return {0.0, 0.0};
  double th = 2.0 * kPi * double((j % (q - 1)) * int64_t(dlog[size_t(a)]) % (q - 1)) / double(q - 1);
  return {std::cos(th), std::sin(th)};
}

cplxd PrimeModulus::orthogonality_sum(int64_t a, int64_t b) const {
  cplxd acc{0, 0};
  for (int64_t j = 0; j < q - 1; ++j)
    acc += char_value(j, a) * std::conj(char_value(j, b));
  return acc;
}

cplxd PrimeModulus::gauss_sum(int64_t j) const {
  cplxd acc{0, 0};
  for (int64_t a = 1; a < q; ++a) {
    double th = 2.0 * kPi * double(a) / double(q);
    acc += char_value(j, a) * cplxd{std::cos(th), std::sin(th)};
  }
  return acc;
}

// ---------------------------------------------------------------------------
// exponential sums
// ---------------------------------------------------------------------------
static int64_t inv_mod_i64(int64_t a, int64_t m) {
  int64_t g0 = m, x0 = 0, g1 = a % m, x1 = 1;
  if (g1 < 0) g1 += m;
  while (g1) {
    int64_t qt = g0 / g1;
    int64_t t = g0 - qt * g1; g0 = g1; g1 = t;
    t = x0 - qt * x1; x0 = x1; x1 = t;
  }
  x0 %= m; if (x0 < 0) x0 += m;
  return x0;  // valid when gcd(a,m)=1
}

double kloosterman_sum(int64_t m, int64_t n, int64_t c) {
  static std::map<std::tuple<int64_t, int64_t, int64_t>, double> memo;
  m %= c; if (m < 0) m += c;
  n %= c; if (n < 0) n += c;
  auto key = std::make_tuple(m, n, c);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  double acc = 0;
  for (int64_t x = 1; x <= c; ++x) {
    if (gcd_i64(x, c) != 1) continue;
    int64_t xb = inv_mod_i64(x, c);
    double th = 2.0 * kPi * double((m * x + n * xb) % c) / double(c);
    acc += std::cos(th);   // imaginary parts cancel pairwise (x <-> xbar of -x)
  }
  if (memo.size() < 2000000) memo.emplace(key, acc);
  return acc;
}

const std::vector<std::vector<double>>& kloosterman_table(int64_t c) {
  static std::map<int64_t, std::vector<std::vector<double>>> memo;
  auto it = memo.find(c);
  if (it != memo.end()) return it->second;
  std::vector<std::vector<double>> tab(static_cast<size_t>(c),
                                       std::vector<double>(static_cast<size_t>(c), 0.0));
  std::vector<double> cs(static_cast<size_t>(c));
  for (int64_t k = 0; k < c; ++k) cs[size_t(k)] = std::cos(2.0 * kPi * double(k) / double(c));
  for (int64_t x = 1; x <= c; ++x) {
    if (gcd_i64(x, c) != 1) continue;
    int64_t xb = inv_mod_i64(x, c);
    for (int64_t mm = 0; mm < c; ++mm) {
      int64_t base = (mm * x) % c;
      auto& row = tab[size_t(mm)];
      for (int64_t nn = 0; nn < c; ++nn)
        row[size_t(nn)] += cs[size_t((base + nn * xb) % c)];
    }
  }
  return memo.emplace(c, std::move(tab)).first->second;
}

int64_t ramanujan_sum(int64_t c, int64_t n) {
  const auto& t = SieveTables::shared();
  int64_t acc = 0;
  for (int64_t d : divisors(gcd_i64(c, n))) acc += d * t.mu[static_cast<size_t>(c / d)];
  return acc;
}

int64_t gl3_coefficient(int64_t n, int64_t m) {
  const auto& t = SieveTables::shared();
  int64_t acc = 0;
  for (int64_t d : divisors(gcd_i64(n, m)))
    acc += int64_t(t.mu[size_t(d)]) * t.tau3[size_t(n / d)] * t.tau3[size_t(m / d)];
  return acc;
}

cplxd eta_divisor(int64_t n, double t) {
  cplxd acc{0, 0};
  for (int64_t d1 : divisors(n)) {
    double r = double(d1) / double(n / d1);
    double th = t * std::log(r);
    acc += cplxd{std::cos(th), std::sin(th)};
  }
  return acc;
}

cplxd eta_multiplicative(int64_t n, double t) {
  // local factor at p^e: sum_{j=0..e} p^{it(2j-e)} = geometric series
  cplxd acc{1, 0};
  const auto& tb = SieveTables::shared();
  while (n > 1) {
    int64_t p = (n <= tb.limit) ? tb.spf[size_t(n)] : 0;
    if (p == 0) { for (p = 2; n % p; ++p) {} }
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    cplxd loc{0, 0};
    for (int j = 0; j <= e; ++j) {
      double th = t * (2.0 * j - e) * std::log(double(p));
      loc += cplxd{std::cos(th), std::sin(th)};
    }
    acc *= loc;
  }
  return acc;
}

bool hecke_tau_relation_check(int64_t n, int64_t m) {
  const auto& t = SieveTables::shared();
  int64_t rhs = 0;
  for (int64_t d : divisors(gcd_i64(n, m)))
    rhs += int64_t(t.mu[size_t(d)]) * t.tau[size_t(n / d)] * t.tau[size_t(m / d)];
  int64_t lhs = static_cast<int64_t>(divisors(n * m).size());
  return rhs == lhs;
}

double selberg_identity_residual(int64_t m, int64_t n, int64_t c) {
  double lhs = kloosterman_sum(m, n, c);
  double rhs = 0;
  int64_t g3 = gcd_i64(gcd_i64(m, n), c);
  for (int64_t d : divisors(g3)) rhs += double(d) * kloosterman_sum((m / d) * (n / d), 1, c / d);
  return std::abs(lhs - rhs);
}

bool weil_bound_ok(int64_t m, int64_t n, int64_t c) {
  const auto& t = SieveTables::shared();
  double bound = double(t.tau[size_t(c)]) *
                 std::sqrt(double(gcd_i64(gcd_i64(m, n), c))) * std::sqrt(double(c));
  return std::abs(kloosterman_sum(m, n, c)) <= bound + 1e-6;
}

double twisted_multiplicativity_residual(int64_t A, int64_t r, int64_t n,
                                         int64_t beta2, int64_t c) {
  // requires (beta2, c) = 1, (A, beta2) = 1
  double lhs = kloosterman_sum(A * r, beta2 * n, beta2 * c);
  int64_t b2bar = inv_mod_i64(beta2, c);
  double rhs = double(ramanujan_sum(beta2, r)) * kloosterman_sum(A * r % (c) * b2bar, n, c);
  return std::abs(lhs - rhs);
}

}  // namespace lab
