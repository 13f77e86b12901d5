// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Construction of the flat exponential approximation: the truncated
// exponential E_ell, the Chebyshev window G_{r,s}, the composition
// Q = G(E(x/s)), the degree-reduced P-hat, and the realized (shifted and
// scaled) P. Also houses the property verifiers that back every inequality
// with outward-interval or exact-rational checks.

#pragma once

#include "cheb.hpp"
#include "jsonio.hpp"
#include "poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flatexp {

// How delta was specified. Formulas that need an exact rational use `rat`;
// parameter selection for an e^-n target uses the exponent directly so the
// ceiling arithmetic stays exact.
struct DeltaSpec {
  mpq_class rat;         // exact rational value used in the construction
  std::string form;      // original text: "2^-8", "e^-10", "1/1000", "0.001"
  bool e_power = false;  // true when the target was written e^-n
  long e_exponent = 0;   // n for e^-n targets

  static DeltaSpec from_rational(const mpq_class& q);
};

// Throws std::invalid_argument on malformed input or delta outside (0,1).
DeltaSpec parse_delta(const std::string& text);

struct ConstOverrides {
  bool enabled = false;
  mpq_class c_ell{1}, c_s{1}, c_r{1}, c_k{1};
};

struct FlatParams {
  mpq_class beta{1};
  DeltaSpec delta;
  long ell = 0, s = 0, r = 0, k = 0;
  ConstOverrides overrides;
  bool paper_constants = false;
  std::vector<std::string> warnings;

  // kappa = ln(1/delta)/100, so that delta = e^{-100 kappa}.
  Interval kappa(mpfr_prec_t prec) const;
  // eps = 3 delta e^{2 kappa}, the window accuracy the realized P achieves.
  Interval eps(mpfr_prec_t prec) const;
  void validate() const;  // throws std::invalid_argument naming the violation
};

// Defaults for the "sufficiently small" thresholds; exceeding them is
// reported, not rejected.
mpq_class eps0_default();    // 1/100
mpq_class delta0_default();  // eps0^100

json params_to_json(const FlatParams& params);
FlatParams params_from_json(const json& j);

struct FlatApproxResult {
  RationalPoly p_hat;
  RationalPoly q_full;
  BigPoly p_realized;  // empty until realize_P has run
  FlatParams params;
  long max_coeff_bits = 0;  // largest numerator/denominator bit length in p_hat
};

RationalPoly build_E(long ell);
// E_ell(x/s) with exact coefficients.
RationalPoly build_E_scaled(long ell, long s);

// Exact distribution of a sum of s fair +-1 coins: t -> C(s,(s+t)/2)/2^s for
// |t| <= s, t == s (mod 2). Keys run over negative and positive t alike.
std::map<long, mpq_class> binom_weights(long s);
// P(|t| > r) under the same distribution, exact.
mpq_class binom_tail(long s, long r);

// G_{r,s}(x) = sum over |t| <= r of weight(t) * Phi_|t|(x). Requires r <= s,
// both even.
RationalPoly build_G(long r, long s, ChebCache& cache);

// Q(x) = G_{r,s}(E_ell(x/s)) via an integer-scaled Chebyshev recurrence
// (exact, and far faster than generic composition at large r).
RationalPoly build_Q(const FlatParams& params);
// Reference path through compose(); used to cross-check build_Q at small sizes.
RationalPoly build_Q_reference(const FlatParams& params, ChebCache& cache);

FlatApproxResult build_Phat(const FlatParams& params);

// Parameter selection with exact ceiling arithmetic on a rigorous enclosure
// of log(beta/delta). Overrides scale the four leading constants.
FlatParams select_params(const mpq_class& beta, const DeltaSpec& delta,
                         const ConstOverrides& overrides, bool paper_constants);

// P(x) = (1 - delta e^kappa) e^kappa Phat(x + kappa) at the given precision.
// Stores the result in `result` and returns it. Throws if delta e^kappa >= 1.
BigPoly realize_P(FlatApproxResult& result, mpfr_prec_t prec);

struct PropertyRecord {
  std::string name;
  bool passed = false;
  BigFloat worst_margin;  // sign convention: <= 0 means satisfied
  double worst_margin_d = 0.0;
  double worst_x = 0.0;
  std::string grid_spec;
  bool rigorous = false;
  std::string note;
};

struct PropertyReport {
  std::vector<PropertyRecord> records;
  bool all_passed() const {
    for (auto& r : records)
      if (!r.passed) return false;
    return !records.empty();
  }
  const PropertyRecord* find(const std::string& name) const {
    for (auto& r : records)
      if (r.name == name) return &r;
    return nullptr;
  }
};

struct GridSpec {
  long window_points = 2048;        // equispaced points on the accuracy window
  long log_points_per_decade = 512; // growth-envelope grids
  long tail_factor = 10;            // extend growth grids to tail_factor * s
  long trunc_points = 1024;         // points on the |x| <= 4s truncation grid
  mpfr_prec_t start_prec = 320;     // first interval precision tried
  mpfr_prec_t max_prec = 4096;      // escalation cap
};

// Theorem-style property checks for P-hat: accuracy window, growth on both
// sides, derivative ratio (grid plus real-root exclusion when certify_roots
// is set), and the leading-coefficient / root-magnitude record.
PropertyReport verify_thm_approx(const FlatApproxResult& result,
                                 const GridSpec& grid, bool certify_roots);

// Flatness of the realized P: window accuracy against eps, |P| <= e^{|x|} on
// x <= 0, |P| <= e^{eta x} on x >= 0, plus the derivative-ratio grid check.
PropertyReport verify_flat(const BigPoly& P, const Interval& kappa,
                           const mpq_class& eta, const mpq_class& eps,
                           const mpq_class& x_max, const GridSpec& grid);

// The five truncated-exponential bounds on their stated domains.
PropertyReport check_E_bounds(long ell, const GridSpec& grid);

// Err = Q - Trunc_k(Q): grid bounds on |Err|, |Err'| and the exact
// per-coefficient bound |q_j| <= 5^r (r/s)^j / j!.
PropertyReport check_truncation_error(const FlatApproxResult& result,
                                      const GridSpec& grid);

// Window-approximation bounds for G itself on [-1,1] and [1, x_max].
PropertyReport check_G_bounds(long r, long s, const mpq_class& x_max,
                              const GridSpec& grid, ChebCache& cache);

// Prior construction: product of truncated exponentials with doubling
// degrees; the benchmark baseline.
RationalPoly baseline_product(long beta, const mpq_class& eps);
std::vector<long> baseline_degrees(long beta, const mpq_class& eps);

// Smallest passing parameter set for a given (beta, eps) target, used by the
// degree benchmark. Tuned so Property 1 holds with margin at delta = eps.
FlatParams bench_params(long beta, const mpq_class& eps);

struct BenchRow {
  long beta = 0;
  mpq_class eps;
  long degree_ours = 0;
  long degree_baseline = 0;
  double margin_ours = 0.0;      // measured worst |f - e^{-x}| on the window
  double margin_baseline = 0.0;
  FlatParams params;
};

std::vector<BenchRow> run_bench(const std::vector<long>& betas,
                                const mpq_class& eps);

// --- shared evaluation helpers (used by the verifiers and tests) ---

// Interval evaluations of a rational polynomial with escalating precision.
// Returns the first enclosure for which `conclusive` is true, or the last
// attempt at max_prec.
class EscalatingEval {
 public:
  explicit EscalatingEval(const RationalPoly& p) : rat_(&p) {}
  explicit EscalatingEval(const BigPoly& p) : big_(&p) {}
  Interval eval_at(const mpq_class& x, mpfr_prec_t prec);
  const IntervalPoly& at_precision(mpfr_prec_t prec);

 private:
  const RationalPoly* rat_ = nullptr;
  const BigPoly* big_ = nullptr;
  std::map<mpfr_prec_t, IntervalPoly> cache_;
};

// Equispaced rationals a + (b-a) * i/n for i = 0..n.
std::vector<mpq_class> linear_grid(const mpq_class& a, const mpq_class& b, long n);
// Log-spaced rationals from a to b (0 < a < b), `per_decade` points per
// factor of ten, endpoints included.
std::vector<mpq_class> log_grid(const mpq_class& a, const mpq_class& b, long per_decade);

}  // namespace flatexp
