// ---------------------------------------------------------------------------
// reciprocity.hpp -- stage-by-stage verification of the divisor-sum
// reciprocity chain for the twisted spectral moment
//
//   D(a,b,q; s,u,v) = q \int_{(0)} F(z)
//        \sum_{(m,q)=1, n = (am)^{-1} b r mod q}
//            tau(r) n^{-(s+z)} m^{-(u+z)} r^{-(v-z)}  dz / 2 pi i ,
//
// together with its companion branch
//
//   T3(q; s,u,v)  = \int_{(0)} (q^{2-s-u-2v} - q^{1-u-2v+z})
//                     zeta(s+z) zeta(u+z) zeta(v-z)^2 F(z) dz / 2 pi i .
//
// The chain passes through ten equivalent representations -- character
// orthogonality, Poisson summation mod q, additive reciprocity, Poisson
// summation mod am, Voronoi summation of the r-sum, and a final
// Kloosterman-sum form smoothed by the two-sided Bessel-type weight Psi.
// Every stage is an absolutely convergent sum/integral in the initial region
//
//   2 < Re s, Re v < 3,   10 < Re u < 11,
//
// evaluated *independently* (different summation orders, different
// special-function paths).  chain_verify computes all stages and reports the
// per-link relative residuals; agreement localizes each analytic step of the
// chain, disagreement names the first broken link.
//
// Everything here runs in quad precision (cplx128): the bent-contour weight
// Phi and the vertical-line integrands cancel through many orders of
// magnitude, and double precision does not survive the line Re w = -4.
// ---------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lab/contour.hpp"
#include "lab/prec.hpp"

namespace lab {

// ---------------------------------------------------------------------------
// Parameters and options
// ---------------------------------------------------------------------------

// a, b positive squarefree coprime; q prime with (ab, q) = 1; (s, u, v) in
// the initial region.  The constructor of ChainEngine validates all of this.
struct ChainParams {
  int64_t a = 1, b = 1, q = 5;
  cplx128 s{real128(2.5), real128(0)};
  cplx128 u{real128(10.5), real128(0)};
  cplx128 v{real128(2.5), real128(0)};
};

struct ChainOptions {
  // Vertical w-lines (Re w = 0, -4): uniform trapezoid grid
  // w = c + i t, |t| <= line_height, step line_step.  The integrands are
  // holomorphic in a strip of width ~1 around each line, so the trapezoid
  // rule converges like exp(-2 pi d / h).
  double line_height = 48.0;
  double line_step = 0.25;
  // Reciprocity line Re w = 17/5.  Phi cannot be trapezoided there (for one
  // sign it does not decay at reachable heights), so it is split into its
  // first phi_terms Gamma(w+z)-residues p_0 .. p_{K-1} -- trapezoided on a
  // short grid (p_height, p_step), since p_k decays like F(-w-k) -- plus a
  // remainder whose w-integral is evaluated in closed form against each
  // Dirichlet term and reassembled on the z-line Re z = -(17/5 + K - 1/2)
  // (grid rz_height, rz_step).  phi_terms must stay small: |p_k| grows like
  // e^{(Re w + k)^2}, so every extra term costs digits of cancellation.
  // Both grids must resolve the e^{Im^2} oscillation of F on their line
  // (frequency 2|Re z|): the alias error is e^{-(2 pi/h - 2|Re z|)^2/4}
  // relative to the node scale, which sits ~19 digits above the answer.
  int phi_terms = 3;
  double p_height = 30.0;
  double p_step = 0.2;
  double rz_height = 26.0;
  double rz_step = 0.2;
  // Psi-row (the weight of the final Kloosterman stage) on Re w = 3/2.
  double psi_height = 96.0;
  double psi_step = 0.375;
  // z-line quadrature (Gauss-Legendre unit panels, adaptive stop).
  double z_tol = 1e-13;
  double z_height = 40.0;
  // Truncation bounds.  Each carries a geometric-tail certificate from the
  // exponent audit; see the per-stage comments in the implementation.
  int64_t m_cut = 40;    // m-sum on Re w = 17/5 (exponent Re(u - w) ~ 7.1)
  int64_t m2_cut = 16;   // m-sum on Re w = 0    (exponent ~ 9)
  int64_t mv_cut = 64;   // m2-sum of the Voronoi stage (exponent ~ 5)
  int64_t r_cut = 200;   // direct r-sums (exponent >= 2.5 after Voronoi,
                         // always behind class-sum tails where slower)
  int64_t n_cut = 48;    // direct n-sum of the final stage (exponent ~ 9.25)
  int64_t mk_cut = 64;   // m2-sum of the final Kloosterman stage
  int64_t d_cut = 24;    // d1, d2-sums of the polar terms (exponents >= 9)
  // Residue extraction circle for the polar terms.
  double res_radius = 0.1;
  int res_nodes = 16;
  // Fault injection: conjugate the additive character e(sigma n nu / am) in
  // the second Poisson stage.  Used by tests to confirm that a broken
  // analytic step is caught and localized (link D_RECIP <-> D_POISSON2).
  bool flip_sigma_tilde2 = false;
  // Wall-clock budget for chain_verify; 0 disables.  Checked between stages;
  // exceeding it raises budget_exhausted.
  double budget_seconds = 0;
};

struct budget_exhausted : std::runtime_error {
  explicit budget_exhausted(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Stages and reports
// ---------------------------------------------------------------------------

enum class Stage {
  D_CHARS,      // character sums + trivial-character corrections
  D_SERIES,     // congruence triple sum (orthogonality applied)
  D_POISSON,    // Poisson mod q on Re z = -4
  D_RECIP,      // additive reciprocity, w-line Re w = 17/5
  D_POISSON2,   // Poisson mod am, w-line Re w = 0
  T3_SERIES,    // companion branch, z-line form
  T3_POISSON,   // companion branch after reciprocity, Re w = 17/5
  T3_POISSON2,  // companion branch after Poisson mod amq, Re w = 0
  COMBINED_VORONOI,  // Voronoi/Kloosterman form + polar terms P1 + P2
  K_FINAL,           // final Kloosterman-Psi form + polar terms P1 + P2
};
const char* stage_name(Stage st);

struct StageValue {
  cplx128 value{real128(0), real128(0)};
  double seconds = 0;
  // Conservative estimate of truncation + quadrature error (absolute).
  double err_estimate = 0;
  // Truncation bounds actually used, keyed by variable name.
  std::map<std::string, int64_t> truncations;
};

struct LinkCheck {
  std::string name;  // "LHS<->RHS"
  cplx128 lhs{real128(0), real128(0)}, rhs{real128(0), real128(0)};
  double residual = 0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

struct ChainReport {
  int64_t a = 0, b = 0, q = 0;
  cplx64 s, u, v;
  std::vector<std::pair<std::string, StageValue>> stages;
  std::vector<LinkCheck> links;
  double grand_residual = 0;  // |D - K| / |D|,  D = D_RECIP + T3_SERIES
  bool pass = false;
  double seconds = 0;
};

// ---------------------------------------------------------------------------
// The engine
// ---------------------------------------------------------------------------

class ChainEngine {
 public:
  explicit ChainEngine(const ChainParams& p, const ChainOptions& opt = {});
  ~ChainEngine();

  const ChainParams& params() const { return p_; }
  const ChainOptions& options() const { return opt_; }

  // Lazily evaluated, memoized per stage.  Throws std::domain_error if the
  // exponent audit fails (some infinite sum not absolutely convergent).
  const StageValue& stage(Stage st);

  // Per-stage list of (sum name, real part of the decay exponent); every
  // entry must exceed 1 for absolute convergence.
  std::vector<std::pair<std::string, double>> exponent_audit(Stage st) const;

  // All stages + per-link residuals + the grand residual.
  ChainReport chain_verify(double tol = 1e-5);

  // Polar terms at w = 1 - v (double pole of the twisted divisor L-function
  // L(v+w, */c) with Laurent data 1/c, (2 gamma - 2 log c)/c).  By default
  // the Laurent data enters in closed form; laurent_numeric extracts it from
  // a circle integral of the Estermann function with the given numerator,
  // which makes the numerator-independence of the residue a real test.
  cplx128 residue_P1(bool laurent_numeric = false, int64_t numerator = 1,
                     double radius = 0, int64_t d_cut = 0);
  cplx128 residue_P2(bool laurent_numeric = false, int64_t numerator = 1,
                     double radius = 0, int64_t d_cut = 0);

  // Correction polynomial of the trivial-character term and the term itself,
  //   T_triv = \int_{(0)} zeta(s+z) zeta(u+z) zeta(v-z)^2 P_q(z) F(z) dz/2pi i.
  cplx128 pq_poly(const cplx128& z) const;
  cplx128 trivial_term();

  // Fault injection toggle; invalidates only the affected stage memo.
  void set_flip_sigma_tilde2(bool on);

  // Spectral-weight transform of the Eisenstein contribution:
  //   Lpsi(eps, t) = \int_0^infty J^eps(x, t) Psi^{pm,sigma,tau}(x) dx / x
  // computed in Mellin space on Re w = -1/4 (where both Bessel kernels have
  // convergent Mellin transforms).  Index order: pm, sigma, tau in {+1,-1}.
  cplx128 lpsi(int pm, int sigma, int tau, int eps, const real128& t);

  // Eisenstein spectral weight Theta^Eis(s,u,v; t): the finite divisor sums
  // and Euler factors attached to the level-B2*B3*alpha2 Eisenstein series,
  // weighted by lpsi.  Finite for real t; |t| < 1e-6 is nudged off the
  // zeta(1 +- 2it) pole (the limit value is 0).
  cplx64 theta_eis(double t);

 private:
  struct Impl;
  ChainParams p_;
  ChainOptions opt_;
  std::unique_ptr<Impl> impl_;
  std::map<Stage, StageValue> memo_;

  StageValue compute(Stage st);
};

// ---------------------------------------------------------------------------
// Finite rearrangement identities of the Eisenstein analysis
// ---------------------------------------------------------------------------

// B2-part rearrangement: for squarefree B2, fixed b2pp, g2pp with
// b2pp * g2pp | n, and real t,
//
//   sum_{b2' | v1 | B2} sum_{g2' | B2/v1} (1/v1) mu(b2' g2') b2'
//        (g2'/b2')^{it} eta(B2 n / (b2' b2pp g2' g2pp), -t)
//     = sum_{d1 b0 d2 = B2, d1 d2 | n*} mu(d1 d2) (1/(d1 b0))
//          eta(b0, -t) eta(n*/(d1 d2), -t),        n* = n/(b2pp g2pp).
//
// Returns |LHS - RHS| (both sides enumerated exactly).
double eisenstein_rearrangement_check(int64_t B2, int64_t b2pp, int64_t g2pp,
                                      int64_t n, double t);

// r-sum Euler-factor identity: for (B, q) = (B2, B q) = 1, B squarefree,
// q prime, Re z >= 3,
//
//   sum_{(B2, r)=1} tau(rB) eta(qr, t) r^{-z}
//     = [ (eta(q,t) - 2 q^{-z}) / (1 - q^{-2z}) ]
//       * prod_{p | B} [ (2 - eta(p,t) p^{-z}) / (1 - p^{-2z}) ]
//       * sum_{(B2, r)=1} tau(r) eta(r, t) r^{-z}.
//
// Both sides truncated at r <= r_cut; returns the relative residual.
double rsum_identity_check(int64_t B, int64_t B2, int64_t q, cplx64 z,
                           double t, int64_t r_cut = 300000);

}  // namespace lab
