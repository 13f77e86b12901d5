// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jsonio.hpp"
#include "poly.hpp"

#include <random>

using namespace flatexp;

namespace {

std::mt19937_64 rng(20260815);

mpq_class rand_q() {
  std::uniform_int_distribution<long> num(-40, 40), den(1, 12);
  mpq_class q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

RationalPoly rand_poly(long max_deg) {
  std::uniform_int_distribution<long> d(0, max_deg);
  std::vector<mpq_class> c(d(rng) + 1);
  for (auto& q : c) q = rand_q();
  return RationalPoly(std::move(c));
}

RationalPoly2 rand_poly2(int max_deg, int terms) {
  RationalPoly2 p;
  std::uniform_int_distribution<int> d(0, max_deg);
  for (int t = 0; t < terms; ++t) p.set(d(rng), d(rng), rand_q());
  return p;
}

}  // namespace

TEST_CASE("ring identities on random rational polynomials") {
  for (int it = 0; it < 50; ++it) {
    RationalPoly a = rand_poly(8), b = rand_poly(8), c = rand_poly(6);
    CHECK(mul(a, b) == mul(b, a));
    CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
    CHECK(mul(add(a, b), c) == add(mul(a, c), mul(b, c)));
    CHECK(sub(add(a, b), b) == a);
    CHECK(add(a, RationalPoly::zero()) == a);
  }
}

TEST_CASE("degree and leading coefficient arithmetic") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(7), b = rand_poly(7);
    if (a.is_zero() || b.is_zero()) continue;
    CHECK(mul(a, b).degree() == a.degree() + b.degree());
    CHECK(mul(a, b).lc() == a.lc() * b.lc());
  }
  CHECK(RationalPoly::zero().degree() == -1);
  // canonical form drops trailing zeros
  RationalPoly t(std::vector<mpq_class>{1, 2, 0, 0});
  CHECK(t.degree() == 1);
}

TEST_CASE("evaluation is a ring homomorphism") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(8), b = rand_poly(8);
    mpq_class x = rand_q();
    CHECK(eval(add(a, b), x) == eval(a, x) + eval(b, x));
    CHECK(eval(mul(a, b), x) == eval(a, x) * eval(b, x));
  }
}

TEST_CASE("composition: degree, evaluation, right identity") {
  for (int it = 0; it < 20; ++it) {
    RationalPoly outer = rand_poly(5), inner = rand_poly(4);
    RationalPoly comp = compose(outer, inner);
    if (!outer.is_zero() && inner.degree() >= 1)
      CHECK(comp.degree() <= outer.degree() * inner.degree());
    mpq_class x = rand_q();
    CHECK(eval(comp, x) == eval(outer, eval(inner, x)));
    CHECK(compose(outer, RationalPoly::x()) == outer);
  }
}

TEST_CASE("derivative: linearity and product rule") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(8), b = rand_poly(8);
    CHECK(derivative(add(a, b)) == add(derivative(a), derivative(b)));
    CHECK(derivative(mul(a, b)) ==
          add(mul(derivative(a), b), mul(a, derivative(b))));
  }
}

TEST_CASE("antiderivative inverts derivative and vanishes at zero") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(8);
    RationalPoly u = antiderivative(a);
    CHECK(derivative(u) == a);
    CHECK(eval(u, 0) == 0);
  }
}

TEST_CASE("truncation splits a polynomial exactly") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(10);
    long k = std::uniform_int_distribution<long>(0, 12)(rng);
    RationalPoly head = truncate(a, k);
    CHECK(head.degree() <= k);
    RationalPoly tail = sub(a, head);
    for (long j = 0; j <= std::min<long>(k, tail.degree()); ++j)
      CHECK(tail.coeff(j) == 0);
    CHECK(add(head, tail) == a);
  }
}

TEST_CASE("rational JSON round trips exactly") {
  for (int it = 0; it < 20; ++it) {
    RationalPoly a = rand_poly(9);
    CHECK(rational_poly_from_json(to_json(a)) == a);
    RationalPoly2 p = rand_poly2(6, 10);
    CHECK(rational_poly2_from_json(to_json(p)) == p);
  }
}

TEST_CASE("big-float JSON round trips bit for bit") {
  for (int it = 0; it < 10; ++it) {
    BigPoly b = to_big(rand_poly(9), 256);
    BigPoly back = big_poly_from_json(to_json(b));
    REQUIRE(back.c.size() == b.c.size());
    CHECK(back.precision_bits == b.precision_bits);
    for (size_t j = 0; j < b.c.size(); ++j)
      CHECK(BigFloat::sub(back.c[j], b.c[j], 256).is_zero());

    BigPoly2 p2 = to_big2(rand_poly2(6, 10), 256);
    BigPoly2 back2 = big_poly2_from_json(to_json(p2));
    REQUIRE(back2.c.size() == p2.c.size());
    for (auto& [key, v] : p2.c)
      CHECK(BigFloat::sub(back2.c.at(key), v, 256).is_zero());
  }
}

TEST_CASE("interval evaluation encloses the exact value") {
  for (int it = 0; it < 30; ++it) {
    RationalPoly a = rand_poly(9);
    mpq_class x = rand_q();
    mpq_class exact = eval(a, x);
    for (mpfr_prec_t prec : {64, 128, 256}) {
      IntervalPoly ip = to_interval(a, prec);
      Interval v = eval(ip, Interval::from_mpq(x, prec));
      BigFloat ex = BigFloat::from_mpq(exact, 512, MPFR_RNDN);
      CHECK(mpfr_cmp(v.lo.raw(), ex.raw()) <= 0);
      CHECK(mpfr_cmp(v.hi.raw(), ex.raw()) >= 0);
    }
  }
}

TEST_CASE("bivariate arithmetic against point evaluation") {
  for (int it = 0; it < 25; ++it) {
    RationalPoly2 a = rand_poly2(5, 8), b = rand_poly2(5, 8);
    mpq_class x = rand_q(), y = rand_q();
    CHECK(eval2(add2(a, b), x, y) == eval2(a, x, y) + eval2(b, x, y));
    CHECK(eval2(mul2(a, b), x, y) == eval2(a, x, y) * eval2(b, x, y));
    CHECK(eval2(scale2(a, mpq_class(3, 7)), x, y) ==
          eval2(a, x, y) * mpq_class(3, 7));
  }
}

TEST_CASE("affine substitution and diagonal restriction") {
  for (int it = 0; it < 20; ++it) {
    RationalPoly2 a = rand_poly2(4, 6);
    mpq_class x = rand_q(), y = rand_q();
    // x -> (x+y)/2, y -> (x-y)/2
    RationalPoly2 h = affine2(a, mpq_class(1, 2), mpq_class(1, 2), 0,
                              mpq_class(1, 2), mpq_class(-1, 2), 0);
    CHECK(eval2(h, x, y) == eval2(a, (x + y) / 2, (x - y) / 2));

    RationalPoly p = rand_poly(6);
    RationalPoly2 e = embed_affine(p, 2, mpq_class(-1, 3), 5);
    CHECK(eval2(e, x, y) == eval(p, 2 * x - y / 3 + 5));

    CHECK(eval(restrict_diag(a), x) == eval2(a, x, x));
  }
}

TEST_CASE("symmetry predicate") {
  RationalPoly2 sym;
  sym.set(2, 0, 1);
  sym.set(0, 2, 1);
  sym.set(1, 1, mpq_class(-3, 2));
  CHECK(symmetric2(sym));
  sym.set(3, 0, 1);
  CHECK(!symmetric2(sym));
}

TEST_CASE("lambda-polynomial integration is exact termwise") {
  // p(lambda) = a + b lambda + c lambda^2 integrates to a + b/2 + c/3
  RationalPoly2 a = rand_poly2(3, 4), b = rand_poly2(3, 4), c = rand_poly2(3, 4);
  LambdaPoly2 lp = {a, b, c};
  RationalPoly2 want = add2(a, add2(scale2(b, mpq_class(1, 2)),
                                    scale2(c, mpq_class(1, 3))));
  CHECK(integrate_in_lambda(lp) == want);

  // lp_mul matches pointwise products at sampled lambda
  LambdaPoly2 lq = {b, c};
  LambdaPoly2 prod = lp_mul(lp, lq);
  for (mpq_class lam : {mpq_class(0), mpq_class(1, 3), mpq_class(1)}) {
    auto at = [&](const LambdaPoly2& f) {
      RationalPoly2 acc;
      mpq_class pw = 1;
      for (const RationalPoly2& coeff : f) {
        acc = add2(acc, scale2(coeff, pw));
        pw *= lam;
      }
      return acc;
    };
    CHECK(at(prod) == mul2(at(lp), at(lq)));
  }
}

TEST_CASE("big-float shift matches exact rational shift") {
  for (int it = 0; it < 10; ++it) {
    RationalPoly a = rand_poly(7);
    mpq_class off = rand_q();
    RationalPoly exact = compose(a, RationalPoly({off, 1}));
    BigPoly shifted = shift(a, BigFloat::from_mpq(off, 256, MPFR_RNDN), 256);
    REQUIRE(shifted.degree() == exact.degree());
    for (size_t j = 0; j < shifted.c.size(); ++j) {
      BigFloat want = BigFloat::from_mpq(exact.coeff(j), 256, MPFR_RNDN);
      BigFloat err = BigFloat::abs(BigFloat::sub(shifted.c[j], want, 256));
      BigFloat tol = BigFloat::mul_2si(
          BigFloat::add(BigFloat::abs(want), BigFloat::from_long(1, 256), 256),
          -200);
      CHECK(mpfr_cmp(err.raw(), tol.raw()) <= 0);
    }
  }
}
