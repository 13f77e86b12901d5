// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#include "poly.hpp"

#include <stdexcept>

namespace flatexp {

RationalPoly add(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), mpq_class(0));
  for (size_t j = 0; j < a.c.size(); ++j) r.c[j] = a.c[j];
  for (size_t j = 0; j < b.c.size(); ++j) r.c[j] += b.c[j];
  r.canonicalize();
  return r;
}

RationalPoly sub(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), mpq_class(0));
  for (size_t j = 0; j < a.c.size(); ++j) r.c[j] = a.c[j];
  for (size_t j = 0; j < b.c.size(); ++j) r.c[j] -= b.c[j];
  r.canonicalize();
  return r;
}

RationalPoly mul(const RationalPoly& a, const RationalPoly& b) {
  if (a.is_zero() || b.is_zero()) return RationalPoly::zero();
  RationalPoly r;
  r.c.assign(a.c.size() + b.c.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (size_t j = 0; j < b.c.size(); ++j) {
      if (b.c[j] == 0) continue;
      r.c[i + j] += a.c[i] * b.c[j];
    }
  }
  r.canonicalize();
  return r;
}

RationalPoly scale(const RationalPoly& a, const mpq_class& k) {
  if (k == 0) return RationalPoly::zero();
  RationalPoly r = a;
  for (auto& q : r.c) q *= k;
  return r;
}

RationalPoly compose(const RationalPoly& outer, const RationalPoly& inner) {
  // Horner over polynomial arithmetic
  if (outer.is_zero()) return RationalPoly::zero();
  RationalPoly acc = RationalPoly::constant(outer.c.back());
  for (long j = outer.degree() - 1; j >= 0; --j) {
    acc = mul(acc, inner);
    if (outer.c[j] != 0) acc = add(acc, RationalPoly::constant(outer.c[j]));
  }
  return acc;
}

RationalPoly derivative(const RationalPoly& p) {
  RationalPoly r;
  if (p.c.size() <= 1) return r;
  r.c.resize(p.c.size() - 1);
  for (size_t j = 1; j < p.c.size(); ++j) r.c[j - 1] = p.c[j] * mpq_class(static_cast<long>(j));
  r.canonicalize();
  return r;
}

RationalPoly antiderivative(const RationalPoly& p) {
  RationalPoly r;
  if (p.is_zero()) return r;
  r.c.assign(p.c.size() + 1, mpq_class(0));
  for (size_t j = 0; j < p.c.size(); ++j)
    r.c[j + 1] = p.c[j] / mpq_class(static_cast<long>(j + 1));
  r.canonicalize();
  return r;
}

RationalPoly truncate(const RationalPoly& p, long k) {
  RationalPoly r = p;
  if (k < 0) return RationalPoly::zero();
  if (static_cast<long>(r.c.size()) > k + 1) r.c.resize(k + 1);
  r.canonicalize();
  return r;
}

mpq_class eval(const RationalPoly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (long j = p.degree(); j >= 0; --j) acc = acc * x + p.c[j];
  return acc;
}

BigPoly to_big(const RationalPoly& p, mpfr_prec_t prec) {
  BigPoly r;
  r.precision_bits = prec;
  r.c.reserve(p.c.size());
  for (auto& q : p.c) r.c.push_back(BigFloat::from_mpq(q, prec, MPFR_RNDN));
  return r;
}

BigFloat eval(const BigPoly& p, const BigFloat& x) {
  mpfr_prec_t prec = p.precision_bits;
  BigFloat acc = BigFloat::from_long(0, prec);
  for (long j = static_cast<long>(p.c.size()) - 1; j >= 0; --j)
    acc = BigFloat::add(BigFloat::mul(acc, x, prec), p.c[j], prec);
  return acc;
}

BigPoly big_add(const BigPoly& a, const BigPoly& b) {
  BigPoly r;
  r.precision_bits = std::max(a.precision_bits, b.precision_bits);
  r.c.resize(std::max(a.c.size(), b.c.size()), BigFloat::from_long(0, r.precision_bits));
  for (size_t j = 0; j < r.c.size(); ++j) {
    BigFloat av = j < a.c.size() ? a.c[j] : BigFloat::from_long(0, r.precision_bits);
    BigFloat bv = j < b.c.size() ? b.c[j] : BigFloat::from_long(0, r.precision_bits);
    r.c[j] = BigFloat::add(av, bv, r.precision_bits);
  }
  return r;
}

BigPoly big_scale(const BigPoly& a, const BigFloat& k) {
  BigPoly r = a;
  for (auto& v : r.c) v = BigFloat::mul(v, k, r.precision_bits);
  return r;
}

BigPoly shift(const BigPoly& p, const BigFloat& offset, mpfr_prec_t prec) {
  // synthetic division by (x - (-offset)), repeated: Taylor coefficients at -offset...
  // i.e. q(x) = p(x + offset): divide repeatedly by (x - offset) shifted form.
  BigPoly r;
  r.precision_bits = prec;
  size_t n = p.c.size();
  r.c.reserve(n);
  std::vector<BigFloat> work;
  work.reserve(n);
  for (auto& v : p.c) work.push_back(v);
  if (n == 0) return r;
  for (size_t round = 0; round < n; ++round) {
    // Horner pass: remainder of division by (x - offset) is q(offset)
    for (size_t j = n - 1 - round; j-- > 0;)
      work[j] = BigFloat::add(work[j], BigFloat::mul(work[j + 1], offset, prec), prec);
    r.c.push_back(work[0]);
    // quotient shifts down
    work.erase(work.begin());
  }
  return r;
}

BigPoly shift(const RationalPoly& p, const BigFloat& offset, mpfr_prec_t prec) {
  return shift(to_big(p, prec), offset, prec);
}

IntervalPoly to_interval(const RationalPoly& p, mpfr_prec_t prec) {
  IntervalPoly r;
  r.prec = prec;
  r.c.reserve(p.c.size());
  for (auto& q : p.c) r.c.push_back(Interval::from_mpq(q, prec));
  return r;
}

IntervalPoly to_interval(const BigPoly& p, mpfr_prec_t prec) {
  IntervalPoly r;
  r.prec = prec;
  r.c.reserve(p.c.size());
  for (auto& v : p.c) r.c.push_back(Interval::point(v));
  return r;
}

Interval eval(const IntervalPoly& p, const Interval& x) {
  Interval acc = Interval::from_long(0, p.prec);
  for (long j = static_cast<long>(p.c.size()) - 1; j >= 0; --j)
    acc = iadd(imul(acc, x, p.prec), p.c[j], p.prec);
  return acc;
}

RationalPoly2 add2(const RationalPoly2& a, const RationalPoly2& b) {
  RationalPoly2 r = a;
  for (auto& [k, v] : b.c) {
    auto it = r.c.find(k);
    if (it == r.c.end()) r.c[k] = v;
    else {
      it->second += v;
      if (it->second == 0) r.c.erase(it);
    }
  }
  return r;
}

RationalPoly2 sub2(const RationalPoly2& a, const RationalPoly2& b) {
  return add2(a, scale2(b, mpq_class(-1)));
}

RationalPoly2 mul2(const RationalPoly2& a, const RationalPoly2& b) {
  RationalPoly2 r;
  for (auto& [ka, va] : a.c)
    for (auto& [kb, vb] : b.c) {
      std::pair<int, int> k{ka.first + kb.first, ka.second + kb.second};
      auto it = r.c.find(k);
      if (it == r.c.end()) r.c[k] = va * vb;
      else {
        it->second += va * vb;
        if (it->second == 0) r.c.erase(it);
      }
    }
  return r;
}

RationalPoly2 scale2(const RationalPoly2& a, const mpq_class& k) {
  RationalPoly2 r;
  if (k == 0) return r;
  r = a;
  for (auto& [kk, v] : r.c) v *= k;
  return r;
}

mpq_class eval2(const RationalPoly2& p, const mpq_class& x, const mpq_class& y) {
  // group by x-degree, Horner in x of Horner-in-y rows
  std::map<int, RationalPoly> rows;
  for (auto& [k, v] : p.c) {
    auto& row = rows[k.first];
    if (static_cast<long>(row.c.size()) <= k.second) row.c.resize(k.second + 1, mpq_class(0));
    row.c[k.second] = v;
  }
  mpq_class acc = 0;
  int prev = -1;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (prev >= 0)
      for (int i = 0; i < prev - it->first; ++i) acc *= x;
    it->second.canonicalize();
    acc += eval(it->second, y);
    prev = it->first;
  }
  for (int i = 0; i < prev; ++i) acc *= x;
  return acc;
}

RationalPoly2 affine2(const RationalPoly2& p,
                      const mpq_class& ax, const mpq_class& bx, const mpq_class& cx,
                      const mpq_class& ay, const mpq_class& by, const mpq_class& cy) {
  RationalPoly2 X, Y, one;
  X.set(1, 0, ax); X.set(0, 1, bx); X.set(0, 0, cx);
  Y.set(1, 0, ay); Y.set(0, 1, by); Y.set(0, 0, cy);
  // cache powers
  std::vector<RationalPoly2> xp{RationalPoly2{}}, yp{RationalPoly2{}};
  xp[0].set(0, 0, 1); yp[0].set(0, 0, 1);
  RationalPoly2 r;
  for (auto& [k, v] : p.c) {
    while (static_cast<int>(xp.size()) <= k.first) xp.push_back(mul2(xp.back(), X));
    while (static_cast<int>(yp.size()) <= k.second) yp.push_back(mul2(yp.back(), Y));
    RationalPoly2 term = mul2(xp[k.first], yp[k.second]);
    r = add2(r, scale2(term, v));
  }
  return r;
}

RationalPoly2 embed_affine(const RationalPoly& p,
                           const mpq_class& ax, const mpq_class& by, const mpq_class& c) {
  RationalPoly2 lin;
  lin.set(1, 0, ax); lin.set(0, 1, by); lin.set(0, 0, c);
  RationalPoly2 acc;
  if (p.is_zero()) return acc;
  acc.set(0, 0, p.c.back());
  for (long j = p.degree() - 1; j >= 0; --j) {
    acc = mul2(acc, lin);
    if (p.c[j] != 0) {
      RationalPoly2 k;
      k.set(0, 0, p.c[j]);
      acc = add2(acc, k);
    }
  }
  return acc;
}

RationalPoly restrict_diag(const RationalPoly2& p) {
  RationalPoly r;
  for (auto& [k, v] : p.c) {
    size_t d = static_cast<size_t>(k.first + k.second);
    if (r.c.size() <= d) r.c.resize(d + 1, mpq_class(0));
    r.c[d] += v;
  }
  r.canonicalize();
  return r;
}

bool symmetric2(const RationalPoly2& p) {
  for (auto& [k, v] : p.c)
    if (p.coeff(k.second, k.first) != v) return false;
  return true;
}

BigPoly2 to_big2(const RationalPoly2& p, mpfr_prec_t prec) {
  BigPoly2 r;
  r.precision_bits = prec;
  for (auto& [k, v] : p.c) r.c.emplace(k, BigFloat::from_mpq(v, prec, MPFR_RNDN));
  return r;
}

BigPoly2 big2_add(const BigPoly2& a, const BigPoly2& b) {
  BigPoly2 r = a;
  r.precision_bits = std::max(a.precision_bits, b.precision_bits);
  for (auto& [k, v] : b.c) r.add_to(k.first, k.second, v, r.precision_bits);
  return r;
}

BigPoly2 big2_sub(const BigPoly2& a, const BigPoly2& b) {
  return big2_add(a, big2_scale(b, BigFloat::from_long(-1, b.precision_bits)));
}

BigPoly2 big2_mul(const BigPoly2& a, const BigPoly2& b) {
  BigPoly2 r;
  r.precision_bits = std::max(a.precision_bits, b.precision_bits);
  for (auto& [ka, va] : a.c)
    for (auto& [kb, vb] : b.c)
      r.add_to(ka.first + kb.first, ka.second + kb.second,
               BigFloat::mul(va, vb, r.precision_bits), r.precision_bits);
  return r;
}

BigPoly2 big2_scale(const BigPoly2& a, const BigFloat& k) {
  BigPoly2 r = a;
  for (auto& [kk, v] : r.c) v = BigFloat::mul(v, k, r.precision_bits);
  return r;
}

BigFloat eval_big2(const BigPoly2& p, const BigFloat& x, const BigFloat& y) {
  mpfr_prec_t prec = p.precision_bits;
  BigFloat acc = BigFloat::from_long(0, prec);
  // powers cached up to max degrees
  int mx = 0, my = 0;
  for (auto& [k, v] : p.c) { mx = std::max(mx, k.first); my = std::max(my, k.second); }
  std::vector<BigFloat> xp, yp;
  xp.push_back(BigFloat::from_long(1, prec));
  for (int i = 1; i <= mx; ++i) xp.push_back(BigFloat::mul(xp.back(), x, prec));
  yp.push_back(BigFloat::from_long(1, prec));
  for (int i = 1; i <= my; ++i) yp.push_back(BigFloat::mul(yp.back(), y, prec));
  for (auto& [k, v] : p.c)
    acc = BigFloat::add(acc, BigFloat::mul(v, BigFloat::mul(xp[k.first], yp[k.second], prec), prec), prec);
  return acc;
}

Interval eval_big2_interval(const BigPoly2& p, const Interval& x, const Interval& y, mpfr_prec_t prec) {
  Interval acc = Interval::from_long(0, prec);
  int mx = 0, my = 0;
  for (auto& [k, v] : p.c) { mx = std::max(mx, k.first); my = std::max(my, k.second); }
  std::vector<Interval> xp, yp;
  xp.push_back(Interval::from_long(1, prec));
  for (int i = 1; i <= mx; ++i) xp.push_back(imul(xp.back(), x, prec));
  yp.push_back(Interval::from_long(1, prec));
  for (int i = 1; i <= my; ++i) yp.push_back(imul(yp.back(), y, prec));
  for (auto& [k, v] : p.c)
    acc = iadd(acc, imul(Interval::point(v), imul(xp[k.first], yp[k.second], prec), prec), prec);
  return acc;
}

RationalPoly2 integrate_in_lambda(const LambdaPoly2& p) {
  RationalPoly2 r;
  for (size_t j = 0; j < p.size(); ++j)
    r = add2(r, scale2(p[j], mpq_class(1, static_cast<long>(j + 1))));
  return r;
}

LambdaPoly2 lp_add(const LambdaPoly2& a, const LambdaPoly2& b) {
  LambdaPoly2 r(std::max(a.size(), b.size()));
  for (size_t j = 0; j < r.size(); ++j) {
    if (j < a.size()) r[j] = add2(r[j], a[j]);
    if (j < b.size()) r[j] = add2(r[j], b[j]);
  }
  return r;
}

LambdaPoly2 lp_mul(const LambdaPoly2& a, const LambdaPoly2& b) {
  if (a.empty() || b.empty()) return {};
  LambdaPoly2 r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = add2(r[i + j], mul2(a[i], b[j]));
  return r;
}

LambdaPoly2 lp_scale(const LambdaPoly2& a, const mpq_class& k) {
  LambdaPoly2 r = a;
  for (auto& p : r) p = scale2(p, k);
  return r;
}

}  // namespace flatexp
