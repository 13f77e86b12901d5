// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal double-double arithmetic (~106-bit significand) for the Gibbs
// demo's residual enclosures. Standard error-free transformations
// (Dekker/Knuth two_sum, fma-based two_prod).

#pragma once

#include <cmath>

namespace flatexp {

struct dd {
  double hi = 0.0, lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  static dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return dd(s, err);
  }
  static dd quick_two_sum(double a, double b) {
    double s = a + b;
    return dd(s, b - (s - a));
  }
  static dd two_prod(double a, double b) {
    double p = a * b;
    return dd(p, std::fma(a, b, -p));
  }

  friend dd operator+(const dd& a, const dd& b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
  }
  friend dd operator-(const dd& a, const dd& b) {
    dd s = two_sum(a.hi, -b.hi);
    s.lo += a.lo - b.lo;
    return quick_two_sum(s.hi, s.lo);
  }
  friend dd operator*(const dd& a, const dd& b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
  }
  friend dd operator/(const dd& a, const dd& b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * dd(q1);
    double q2 = r.hi / b.hi;
    r = r - b * dd(q2);
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + dd(q3);
  }
  dd operator-() const { return dd(-hi, -lo); }

  friend bool operator<(const dd& a, const dd& b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
  }
  friend bool operator>(const dd& a, const dd& b) { return b < a; }
  friend bool operator<=(const dd& a, const dd& b) { return !(b < a); }
  friend bool operator>=(const dd& a, const dd& b) { return !(a < b); }

  double to_double() const { return hi + lo; }
};

inline dd dd_abs(const dd& a) { return a.hi < 0 || (a.hi == 0 && a.lo < 0) ? -a : a; }

inline dd dd_sqrt(const dd& a) {
  if (a.hi <= 0) return dd(0.0);
  double x = std::sqrt(a.hi);
  dd x2 = dd::two_prod(x, x);
  dd r = (a - x2) / dd(2 * x);  // one Newton step refines to full dd accuracy
  return dd(x) + r;
}

inline dd dd_exp(const dd& a) {
  // exp(hi + lo) = exp(hi) * exp(lo); refine exp(hi) by one Newton-like step
  // using the identity exp(a) = e1 * (1 + (a - log(e1)) + ...) to dd accuracy.
  double e1 = std::exp(a.hi);
  if (e1 == 0.0 || !std::isfinite(e1)) return dd(e1);
  dd r = a - dd(std::log(e1));
  // |r| <= ~2^-52 here, so a degree-2 Taylor tail is below dd resolution
  dd corr = dd(1.0) + r + r * r * dd(0.5);
  return dd(e1) * corr;
}

// Complex double-double.
struct cdd {
  dd re, im;
  cdd() = default;
  cdd(dd r, dd i) : re(r), im(i) {}
  cdd(double r, double i = 0.0) : re(r), im(i) {}

  friend cdd operator+(const cdd& a, const cdd& b) { return cdd(a.re + b.re, a.im + b.im); }
  friend cdd operator-(const cdd& a, const cdd& b) { return cdd(a.re - b.re, a.im - b.im); }
  friend cdd operator*(const cdd& a, const cdd& b) {
    return cdd(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  cdd conj() const { return cdd(re, -im); }
  dd abs2() const { return re * re + im * im; }
};

}  // namespace flatexp
