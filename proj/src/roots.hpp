// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Complex root finding (simultaneous Aberth iteration with Newton-polygon
// initial guesses), certified inclusion disks, and exact Sturm-sequence
// real-root counting for rational polynomials.

#pragma once

#include "poly.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flatexp {

struct RootSet {
  std::vector<Cplx> roots;
  std::vector<BigFloat> radii;  // per-root inclusion-disk radius: the union of
                                // disks D(z_i, radii_i) contains every root
  BigFloat residual;            // max relative evaluation residual over roots
  std::vector<std::pair<int, int>> pairing;  // indices of conjugate pairs
  mpfr_prec_t precision_bits = 0;
  bool converged = false;
  std::string note;
};

RootSet find_roots(const RationalPoly& p, mpfr_prec_t prec);
RootSet find_roots(const BigPoly& p, mpfr_prec_t prec);

struct RealRootCert {
  bool no_real_roots = false;
  bool certified = false;    // true when the exclusion argument is rigorous
  double min_im_over_radius = 0.0;  // worst |Im z| / disk radius over roots
  BigFloat max_root_mag;     // upper bound on |z| over all roots (disk edge)
  long degree = 0;
  bool used_sturm = false;
  std::string note;
};

// Rigorous real-root exclusion: every root lies in some computed disk, so if
// every disk avoids the real axis by a wide factor the polynomial has no real
// root. Falls back to exact Sturm counting for degree <= sturm_degree_cap
// when the disk margin is inconclusive.
RealRootCert certify_no_real_roots(const RationalPoly& p, mpfr_prec_t prec,
                                   long sturm_degree_cap);

// All roots satisfy |z| < bound (classical coefficient quotient bound).
mpq_class cauchy_root_bound(const RationalPoly& p);

// Exact Sturm utilities.
std::vector<RationalPoly> sturm_chain(const RationalPoly& p);
long sign_changes_at(const std::vector<RationalPoly>& chain, const mpq_class& x);
long count_real_roots(const RationalPoly& p);
// count of real roots in the half-open interval (a, b]
long count_real_roots(const RationalPoly& p, const mpq_class& a, const mpq_class& b);
// disjoint rational intervals, one simple real root each (input must be
// square-free, which holds for every polynomial this project feeds in)
std::vector<std::pair<mpq_class, mpq_class>> isolate_real_roots(
    const RationalPoly& p, const mpq_class& max_width);

}  // namespace flatexp
