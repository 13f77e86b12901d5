// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense univariate and sparse bivariate polynomials with exact rational or
// high-precision float coefficients. Rational arithmetic is exact end to end;
// floats enter only where a construction is explicitly realized at a working
// precision (shifts, scaling by transcendental constants).

#pragma once

#include "interval.hpp"

#include <gmpxx.h>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flatexp {

// Dense univariate polynomial with exact rational coefficients.
// Canonical form: no trailing zero coefficients; the zero polynomial is the
// empty vector and reports degree() == -1.
struct RationalPoly {
  std::vector<mpq_class> c;

  RationalPoly() = default;
  explicit RationalPoly(std::vector<mpq_class> coeffs) : c(std::move(coeffs)) { canonicalize(); }

  void canonicalize() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  long degree() const { return static_cast<long>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const mpq_class& coeff(size_t j) const {
    static const mpq_class kZero = 0;
    return j < c.size() ? c[j] : kZero;
  }
  mpq_class lc() const { return c.empty() ? mpq_class(0) : c.back(); }

  static RationalPoly zero() { return RationalPoly(); }
  static RationalPoly constant(const mpq_class& q) {
    RationalPoly p;
    if (q != 0) p.c = {q};
    return p;
  }
  static RationalPoly x() { return RationalPoly({mpq_class(0), mpq_class(1)}); }
  static RationalPoly monomial(const mpq_class& q, size_t deg) {
    RationalPoly p;
    if (q != 0) { p.c.assign(deg + 1, mpq_class(0)); p.c[deg] = q; }
    return p;
  }
  bool operator==(const RationalPoly& o) const { return c == o.c; }
};

RationalPoly add(const RationalPoly& a, const RationalPoly& b);
RationalPoly sub(const RationalPoly& a, const RationalPoly& b);
RationalPoly mul(const RationalPoly& a, const RationalPoly& b);
RationalPoly scale(const RationalPoly& a, const mpq_class& k);
RationalPoly compose(const RationalPoly& outer, const RationalPoly& inner);
RationalPoly derivative(const RationalPoly& p);
// antiderivative with constant term 0, so the result vanishes at 0
RationalPoly antiderivative(const RationalPoly& p);
RationalPoly truncate(const RationalPoly& p, long k);

mpq_class eval(const RationalPoly& p, const mpq_class& x);

// Dense univariate polynomial with BigFloat coefficients at a shared precision.
struct BigPoly {
  std::vector<BigFloat> c;
  mpfr_prec_t precision_bits = 128;

  long degree() const {
    for (long j = static_cast<long>(c.size()) - 1; j >= 0; --j)
      if (!c[j].is_zero()) return j;
    return -1;
  }
};

BigPoly to_big(const RationalPoly& p, mpfr_prec_t prec);
BigFloat eval(const BigPoly& p, const BigFloat& x);
BigPoly big_add(const BigPoly& a, const BigPoly& b);
BigPoly big_scale(const BigPoly& a, const BigFloat& k);

// q(x) = p(x + offset), computed by repeated synthetic division at the
// context precision. Relative coefficient error stays within a few ulps
// times the degree.
BigPoly shift(const BigPoly& p, const BigFloat& offset, mpfr_prec_t prec);
BigPoly shift(const RationalPoly& p, const BigFloat& offset, mpfr_prec_t prec);

// Interval form of a polynomial: each coefficient an outward enclosure.
// Built once per working precision, then evaluated at many points.
struct IntervalPoly {
  std::vector<Interval> c;
  mpfr_prec_t prec = 128;
};

IntervalPoly to_interval(const RationalPoly& p, mpfr_prec_t prec);
IntervalPoly to_interval(const BigPoly& p, mpfr_prec_t prec);
Interval eval(const IntervalPoly& p, const Interval& x);

// Sparse bivariate polynomial, exact rational coefficients.
// Keys are (degree_x, degree_y); no entry is an exact zero.
struct RationalPoly2 {
  std::map<std::pair<int, int>, mpq_class> c;

  void set(int dx, int dy, const mpq_class& q) {
    if (q == 0) c.erase({dx, dy});
    else c[{dx, dy}] = q;
  }
  mpq_class coeff(int dx, int dy) const {
    auto it = c.find({dx, dy});
    return it == c.end() ? mpq_class(0) : it->second;
  }
  bool is_zero() const { return c.empty(); }
  long total_degree() const {
    long d = -1;
    for (auto& [k, v] : c) d = std::max(d, static_cast<long>(k.first + k.second));
    return d;
  }
  bool operator==(const RationalPoly2& o) const { return c == o.c; }
};

RationalPoly2 add2(const RationalPoly2& a, const RationalPoly2& b);
RationalPoly2 sub2(const RationalPoly2& a, const RationalPoly2& b);
RationalPoly2 mul2(const RationalPoly2& a, const RationalPoly2& b);
RationalPoly2 scale2(const RationalPoly2& a, const mpq_class& k);
mpq_class eval2(const RationalPoly2& p, const mpq_class& x, const mpq_class& y);
// substitute x -> ax*X + bx*Y + cx and likewise for y (affine change of variables)
RationalPoly2 affine2(const RationalPoly2& p,
                      const mpq_class& ax, const mpq_class& bx, const mpq_class& cx,
                      const mpq_class& ay, const mpq_class& by, const mpq_class& cy);
// embed a univariate polynomial as p(ax*X + by*Y + c)
RationalPoly2 embed_affine(const RationalPoly& p,
                           const mpq_class& ax, const mpq_class& by, const mpq_class& c);
RationalPoly restrict_diag(const RationalPoly2& p);  // p(x, x)
bool symmetric2(const RationalPoly2& p);             // p(x,y) == p(y,x)

// Sparse bivariate polynomial with BigFloat coefficients.
struct BigPoly2 {
  std::map<std::pair<int, int>, BigFloat> c;
  mpfr_prec_t precision_bits = 128;

  void add_to(int dx, int dy, const BigFloat& v, mpfr_prec_t prec) {
    auto it = c.find({dx, dy});
    if (it == c.end()) c.emplace(std::make_pair(dx, dy), v);
    else it->second = BigFloat::add(it->second, v, prec);
  }
  long total_degree() const {
    long d = -1;
    for (auto& [k, v] : c)
      if (!v.is_zero()) d = std::max(d, static_cast<long>(k.first + k.second));
    return d;
  }
};

BigPoly2 to_big2(const RationalPoly2& p, mpfr_prec_t prec);
BigPoly2 big2_add(const BigPoly2& a, const BigPoly2& b);
BigPoly2 big2_sub(const BigPoly2& a, const BigPoly2& b);
BigPoly2 big2_mul(const BigPoly2& a, const BigPoly2& b);
BigPoly2 big2_scale(const BigPoly2& a, const BigFloat& k);
BigFloat eval_big2(const BigPoly2& p, const BigFloat& x, const BigFloat& y);
Interval eval_big2_interval(const BigPoly2& p, const Interval& x, const Interval& y, mpfr_prec_t prec);

// Polynomial in an integration variable whose coefficients are bivariate
// rational polynomials: index = power of lambda.
using LambdaPoly2 = std::vector<RationalPoly2>;

// exact term-wise integral over lambda in [0,1]
RationalPoly2 integrate_in_lambda(const LambdaPoly2& p);

LambdaPoly2 lp_add(const LambdaPoly2& a, const LambdaPoly2& b);
LambdaPoly2 lp_mul(const LambdaPoly2& a, const LambdaPoly2& b);
LambdaPoly2 lp_scale(const LambdaPoly2& a, const mpq_class& k);

}  // namespace flatexp
