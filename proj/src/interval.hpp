// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Outward-rounded real and complex interval arithmetic on BigFloat.
// Every operation returns an enclosure of the exact result: the lower
// endpoint is rounded down (MPFR_RNDD) and the upper endpoint up (MPFR_RNDU).

#pragma once

#include "bigfloat.hpp"

#include <algorithm>
#include <stdexcept>

namespace flatexp {

struct Interval {
  BigFloat lo, hi;

  Interval() = default;
  Interval(BigFloat l, BigFloat h) : lo(std::move(l)), hi(std::move(h)) {}

  static Interval point(const BigFloat& x) { return Interval(x, x); }
  static Interval from_long(long x, mpfr_prec_t p) {
    return point(BigFloat::from_long(x, p));
  }
  static Interval from_mpq(const mpq_class& q, mpfr_prec_t p) {
    return Interval(BigFloat::from_mpq(q, p, MPFR_RNDD), BigFloat::from_mpq(q, p, MPFR_RNDU));
  }

  bool valid() const { return !lo.is_nan() && !hi.is_nan() && lo <= hi; }
  bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
  bool certainly_positive() const { return lo.sign() > 0; }
  bool certainly_negative() const { return hi.sign() < 0; }
  bool certainly_le(const Interval& o) const { return hi <= o.lo; }
  bool certainly_lt(const Interval& o) const { return hi < o.lo; }
  bool contains(const mpq_class& q) const {
    mpq_class l, h;
    // endpoints are exact binary rationals, so the comparison is exact
    return mpfr_cmp_q(lo.raw(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi.raw(), q.get_mpq_t()) >= 0;
  }

  BigFloat width(mpfr_prec_t p) const { return BigFloat::sub(hi, lo, p, MPFR_RNDU); }
  // magnitude bound: max |x| over the interval
  BigFloat mag() const {
    BigFloat a = BigFloat::abs(lo), b = BigFloat::abs(hi);
    return a > b ? a : b;
  }
  BigFloat mid(mpfr_prec_t p) const {
    return BigFloat::mul_2si(BigFloat::add(lo, hi, p, MPFR_RNDN), -1);
  }
};

inline Interval iadd(const Interval& a, const Interval& b, mpfr_prec_t p) {
  return Interval(BigFloat::add(a.lo, b.lo, p, MPFR_RNDD), BigFloat::add(a.hi, b.hi, p, MPFR_RNDU));
}
inline Interval isub(const Interval& a, const Interval& b, mpfr_prec_t p) {
  return Interval(BigFloat::sub(a.lo, b.hi, p, MPFR_RNDD), BigFloat::sub(a.hi, b.lo, p, MPFR_RNDU));
}
inline Interval ineg(const Interval& a) {
  return Interval(BigFloat::neg(a.hi), BigFloat::neg(a.lo));
}
inline Interval imul(const Interval& a, const Interval& b, mpfr_prec_t p) {
  const BigFloat* as[2] = {&a.lo, &a.hi};
  const BigFloat* bs[2] = {&b.lo, &b.hi};
  BigFloat lo, hi;
  bool first = true;
  for (auto* x : as)
    for (auto* y : bs) {
      BigFloat d = BigFloat::mul(*x, *y, p, MPFR_RNDD);
      BigFloat u = BigFloat::mul(*x, *y, p, MPFR_RNDU);
      if (first) { lo = d; hi = u; first = false; }
      else {
        if (d < lo) lo = d;
        if (u > hi) hi = u;
      }
    }
  return Interval(std::move(lo), std::move(hi));
}
inline Interval idiv(const Interval& a, const Interval& b, mpfr_prec_t p) {
  if (b.contains_zero()) throw std::domain_error("interval division by interval containing zero");
  const BigFloat* as[2] = {&a.lo, &a.hi};
  const BigFloat* bs[2] = {&b.lo, &b.hi};
  BigFloat lo, hi;
  bool first = true;
  for (auto* x : as)
    for (auto* y : bs) {
      BigFloat d = BigFloat::div(*x, *y, p, MPFR_RNDD);
      BigFloat u = BigFloat::div(*x, *y, p, MPFR_RNDU);
      if (first) { lo = d; hi = u; first = false; }
      else {
        if (d < lo) lo = d;
        if (u > hi) hi = u;
      }
    }
  return Interval(std::move(lo), std::move(hi));
}
inline Interval iabs(const Interval& a) {
  if (a.lo.sign() >= 0) return a;
  if (a.hi.sign() <= 0) return ineg(a);
  BigFloat z = BigFloat::from_long(0, a.lo.prec());
  return Interval(z, a.mag());
}
// enclosure of e^x over the interval (mpfr transcendentals honor directed rounding)
inline Interval iexp(const Interval& a, mpfr_prec_t p) {
  return Interval(BigFloat::exp(a.lo, p, MPFR_RNDD), BigFloat::exp(a.hi, p, MPFR_RNDU));
}
inline Interval ilog(const Interval& a, mpfr_prec_t p) {
  if (a.lo.sign() <= 0) throw std::domain_error("interval log needs a positive interval");
  return Interval(BigFloat::log(a.lo, p, MPFR_RNDD), BigFloat::log(a.hi, p, MPFR_RNDU));
}
inline Interval isqrt(const Interval& a, mpfr_prec_t p) {
  if (a.lo.sign() < 0) throw std::domain_error("interval sqrt of a negative interval");
  return Interval(BigFloat::sqrt(a.lo, p, MPFR_RNDD), BigFloat::sqrt(a.hi, p, MPFR_RNDU));
}
inline Interval ihull(const Interval& a, const Interval& b) {
  return Interval(a.lo < b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi);
}

// Complex point arithmetic at fixed precision, round-to-nearest.
struct Cplx {
  BigFloat re, im;
  Cplx() = default;
  Cplx(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  static Cplx from_double(double r, double i, mpfr_prec_t p) {
    return Cplx(BigFloat::from_double(r, p), BigFloat::from_double(i, p));
  }
};

inline Cplx cadd(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  return Cplx(BigFloat::add(a.re, b.re, p), BigFloat::add(a.im, b.im, p));
}
inline Cplx csub(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  return Cplx(BigFloat::sub(a.re, b.re, p), BigFloat::sub(a.im, b.im, p));
}
inline Cplx cmul(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  BigFloat ac = BigFloat::mul(a.re, b.re, p), bd = BigFloat::mul(a.im, b.im, p);
  BigFloat ad = BigFloat::mul(a.re, b.im, p), bc = BigFloat::mul(a.im, b.re, p);
  return Cplx(BigFloat::sub(ac, bd, p), BigFloat::add(ad, bc, p));
}
inline Cplx cdiv(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  BigFloat den = BigFloat::add(BigFloat::mul(b.re, b.re, p), BigFloat::mul(b.im, b.im, p), p);
  BigFloat nr = BigFloat::add(BigFloat::mul(a.re, b.re, p), BigFloat::mul(a.im, b.im, p), p);
  BigFloat ni = BigFloat::sub(BigFloat::mul(a.im, b.re, p), BigFloat::mul(a.re, b.im, p), p);
  return Cplx(BigFloat::div(nr, den, p), BigFloat::div(ni, den, p));
}
inline BigFloat cabs2(const Cplx& a, mpfr_prec_t p) {
  return BigFloat::add(BigFloat::mul(a.re, a.re, p), BigFloat::mul(a.im, a.im, p), p);
}
inline BigFloat cabs(const Cplx& a, mpfr_prec_t p) {
  return BigFloat::sqrt(cabs2(a, p), p);
}

// Rectangular complex intervals, used for rigorous root inclusion disks.
struct CplxInterval {
  Interval re, im;
  CplxInterval() = default;
  CplxInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}
  static CplxInterval point(const Cplx& z) {
    return CplxInterval(Interval::point(z.re), Interval::point(z.im));
  }
};

inline CplxInterval ciadd(const CplxInterval& a, const CplxInterval& b, mpfr_prec_t p) {
  return CplxInterval(iadd(a.re, b.re, p), iadd(a.im, b.im, p));
}
inline CplxInterval cisub(const CplxInterval& a, const CplxInterval& b, mpfr_prec_t p) {
  return CplxInterval(isub(a.re, b.re, p), isub(a.im, b.im, p));
}
inline CplxInterval cimul(const CplxInterval& a, const CplxInterval& b, mpfr_prec_t p) {
  return CplxInterval(isub(imul(a.re, b.re, p), imul(a.im, b.im, p), p),
                      iadd(imul(a.re, b.im, p), imul(a.im, b.re, p), p));
}
inline CplxInterval cidiv(const CplxInterval& a, const CplxInterval& b, mpfr_prec_t p) {
  Interval den = iadd(imul(b.re, b.re, p), imul(b.im, b.im, p), p);
  Interval nr = iadd(imul(a.re, b.re, p), imul(a.im, b.im, p), p);
  Interval ni = isub(imul(a.im, b.re, p), imul(a.re, b.im, p), p);
  return CplxInterval(idiv(nr, den, p), idiv(ni, den, p));
}
// upper bound on |z| over the box
inline BigFloat cimag_ub(const CplxInterval& a, mpfr_prec_t p) {
  BigFloat r = a.re.mag(), i = a.im.mag();
  return BigFloat::sqrt(BigFloat::add(BigFloat::mul(r, r, p, MPFR_RNDU),
                                      BigFloat::mul(i, i, p, MPFR_RNDU), p, MPFR_RNDU),
                        p, MPFR_RNDU);
}

}  // namespace flatexp
