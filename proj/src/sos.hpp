// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bounded sum-of-squares certificates for the bivariate drift polynomial
// R(x, y) built from a strictly positive univariate P with 99 P > |P'|.

#pragma once

#include "flat.hpp"
#include "poly.hpp"
#include "roots.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flatexp {

// Splits a real polynomial with no real roots, even degree and leading
// coefficient in (0, 1] into q1^2 + q2^2: conjugate root pairs go to
// q(x) = sqrt(lc) * prod (x - z_j) over the upper half plane, q1 = Re q,
// q2 = Im q. Throws std::domain_error naming the offending root when a root
// sits too close to the real axis, and std::invalid_argument for degree or
// leading-coefficient violations.
std::pair<BigPoly, BigPoly> pair_roots_sos(const RationalPoly& p,
                                           const RootSet& roots,
                                           mpfr_prec_t prec);
// Convenience: finds the roots itself at `prec`.
std::pair<BigPoly, BigPoly> pair_roots_sos(const RationalPoly& p,
                                           mpfr_prec_t prec);

struct BoundedCheck {
  bool ok = false;
  long degree = 0;          // total degree found
  long d_bound = 0;         // the d it was checked against
  BigFloat worst_ratio;     // max over monomials of |coeff| * d'! / C
  int worst_dx = 0, worst_dy = 0;
};

// True iff total degree <= d and every total-degree-d' coefficient has
// magnitude <= C / d'!.
BoundedCheck check_bounded(const BigPoly2& p, long d, const BigFloat& C,
                           mpfr_prec_t prec);

// R(x,y) = (x-y)/2 * (1 + (x-y)^2/4) * (q(x) - q(y))
//          - (x-y)^2/4000 * (p(x) + p(y)), exact. Requires q' = p.
RationalPoly2 build_r_direct(const RationalPoly& p, const RationalPoly& q);

// The same R as an iterated integral over lambda in [0, 1] of
//   (c a^2 + a^4) p(z + lambda a) - a^3/1000 * w(lambda) p'(z + lambda a)
// plus the mirrored branch in z - lambda a, with z = (x+y)/2, a = (x-y)/2.
// `printed` uses c = 499/500, w = 2 - lambda and a minus sign on both
// branches. `corrected` uses c = 999/1000, w = lambda and a plus sign on the
// mirrored derivative term, which is the exact identity.
enum class RIntegralForm { printed, corrected };
RationalPoly2 build_r_integral(const RationalPoly& p, RIntegralForm form);

struct ReconcileReport {
  RationalPoly2 r_direct;
  RationalPoly2 residual_printed;    // build_r_integral(printed) - r_direct
  RationalPoly2 residual_corrected;  // build_r_integral(corrected) - r_direct
  bool printed_exact = false;
  bool corrected_exact = false;
  mpq_class corrected_inner{999, 1000};
};

// Exact rational comparison of the direct and integral forms of R.
ReconcileReport reconcile_r_forms(const RationalPoly& p);

// Given square lists for A+B, A-B, C+D, C-D, returns square lists for
// AC - BD and AC + BD via 2(AC - BD) = (A-B)(C+D) + (A+B)(C-D) and
// 2(AC + BD) = (A-B)(C-D) + (A+B)(C+D); each product of squares expands as
// (sum q_i^2)(sum r_j^2) = sum (q_i r_j)^2 and the halving scales every
// square by sqrt(1/2).
std::pair<std::vector<BigPoly2>, std::vector<BigPoly2>> acbd_compose(
    const std::vector<BigPoly2>& sos_a_plus_b,
    const std::vector<BigPoly2>& sos_a_minus_b,
    const std::vector<BigPoly2>& sos_c_plus_d,
    const std::vector<BigPoly2>& sos_c_minus_d, mpfr_prec_t prec);

// Substitutes u -> ((1+lambda) x + (1-lambda) y) / 2 (toward_x) or
// ((1-lambda) x + (1+lambda) y) / 2 into each univariate square. An affine
// substitution with coefficients in [0, 1] summing to 1 preserves the
// coefficient-boundedness of the squares.
std::vector<BigPoly2> sos_for_shifted(const std::vector<BigPoly>& squares,
                                      const mpq_class& lambda, bool toward_x,
                                      mpfr_prec_t prec);

// One lambda-parameterized square family alpha * sqrt(weight(lambda)) *
// w(x, y; lambda): `weight` must be nonnegative on [0, 1] and `coeffs` maps
// each monomial of w to its coefficient as a polynomial in lambda. The
// square root never materializes: the Gram matrix only sees alpha2 * weight.
struct LambdaSquare {
  BigFloat alpha2;               // square of scalar prefactor
  std::vector<BigFloat> weight;  // polynomial in lambda, ascending
  std::map<std::pair<int, int>, std::vector<BigFloat>> coeffs;  // (dx,dy) -> poly in lambda
};

struct GramDiag {
  long basis_size = 0;
  long rank = 0;
  BigFloat min_pivot;     // most negative pivot encountered (clamped to 0)
  BigFloat max_pivot;
  BigFloat clamp_tol;     // pivots in [-clamp_tol, 0) were clamped
};

// Integrates the Gram matrix of the family exactly over lambda in [0, 1]
// (entries are polynomials in lambda, so the integral is termwise exact up
// to rounding at `prec`), then factors the positive semidefinite result with
// a diagonally pivoted Cholesky into explicit squares. Throws
// std::runtime_error when a pivot is negative beyond
// 2^(-prec/4) * max diagonal, i.e. the matrix is indefinite beyond rounding.
std::vector<BigPoly2> integrate_sos_family(
    const std::vector<LambdaSquare>& family, mpfr_prec_t prec,
    GramDiag* diag = nullptr);

struct SosCertificate {
  std::vector<BigPoly2> squares;
  long k_count = 0;     // number of squares
  long d_bound = 0;     // degree bound d in the (k, d, C)-bounded sense
  BigFloat c_bound;     // coefficient bound C, reported as achieved
  BigFloat max_coeff_residual;  // |sum squares - R| relative, coefficientwise
  BigFloat max_point_residual;  // same at sampled points in [-2, 2]^2
  long points_tested = 0;
  bool has_provenance = false;
  FlatParams provenance;        // set when built from a constructed instance
};

struct RCertResult {
  RationalPoly2 R;  // exact target: r_direct(P, U) + a^2/1000 * P(y)
  SosCertificate cert;
  GramDiag gram;
  std::string stage;  // last pipeline stage reached (names the failure point)
};

// Builds the certificate for
//   R(x,y) = (x-y)/2 (1 + (x-y)^2/4)(U(x) - U(y)) - (x-y)^2/4000 P(x)
// with U' = P. Requires P of even degree with leading coefficient in (0, 1],
// P > 0 everywhere and 99 P > |P'| everywhere (so 99P +- P' have no real
// roots). Throws with the failing stage recorded in the exception message.
RCertResult build_R_certificate(const RationalPoly& P, mpfr_prec_t prec,
                                uint64_t seed = 1);
// Certificate for the exact pre-realization polynomial of a constructed
// instance; records the construction parameters as provenance.
RCertResult build_R_certificate(const FlatApproxResult& result,
                                mpfr_prec_t prec, uint64_t seed = 1);

struct CertReport {
  BigFloat max_coeff_residual;
  BigFloat max_point_residual;
  long points_tested = 0;
  bool bounded_ok = false;  // every square passed check_bounded(d, C)
  bool pass = false;
  std::string note;
};

// Independent re-verification: expands sum of squares, compares against R
// coefficientwise and at n random points in [-2, 2]^2, and re-runs
// check_bounded on every square against the certificate's (d, C).
CertReport verify_certificate(const RationalPoly2& R,
                              const SosCertificate& cert, long n_points,
                              mpfr_prec_t prec, uint64_t seed);

// JSON round trip for certificates (hex-float squares, exact rational R).
std::string certificate_to_json(const RCertResult& rc);
RCertResult certificate_from_json(const std::string& text);

}  // namespace flatexp
