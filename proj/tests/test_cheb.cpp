// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cheb.hpp"
#include "flat.hpp"

#include <random>

using namespace flatexp;

TEST_CASE("small table entries are the classical polynomials") {
  ChebCache cache;
  CHECK(cache.get(0) == RationalPoly::constant(1));
  CHECK(cache.get(1) == RationalPoly::x());
  CHECK(cache.get(2) == RationalPoly({-1, 0, 2}));
  CHECK(cache.get(3) == RationalPoly({0, -3, 0, 4}));
  CHECK(cache.get(-3) == cache.get(3));
}

TEST_CASE("recurrence holds exactly across the table") {
  ChebCache cache;
  RationalPoly two_x({0, 2});
  for (long t = 1; t < 120; ++t)
    CHECK(cache.get(t + 1) ==
          sub(mul(two_x, cache.get(t)), cache.get(t - 1)));
}

TEST_CASE("value 1 at x = 1 and parity of coefficients") {
  ChebCache cache;
  for (long t = 0; t <= 80; ++t) {
    CHECK(eval(cache.get(t), 1) == 1);
    CHECK(eval(cache.get(t), -1) == (t % 2 ? -1 : 1));
    CHECK(check_parity(cache, t));
  }
}

TEST_CASE("coefficient growth bound") {
  ChebCache cache;
  for (long t = 0; t <= 100; ++t) CHECK(check_coeff_bound(cache, t));
}

TEST_CASE("derivative bound on a grid inside [-1, 1]") {
  ChebCache cache;
  std::vector<mpq_class> grid = linear_grid(-1, 1, 400);
  for (long t : {1L, 2L, 5L, 10L, 17L}) CHECK(check_markov(cache, t, grid));
}

TEST_CASE("nesting: composing two entries gives the product index") {
  ChebCache cache;
  for (long m : {2L, 3L, 4L, 5L, 6L})
    for (long n : {2L, 3L, 4L, 5L, 6L, 10L}) {
      if (m * n > 60) continue;
      CHECK(compose(cache.get(m), cache.get(n)) == cache.get(m * n));
    }
}

TEST_CASE("trigonometric identity at random points") {
  ChebCache cache;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const mpfr_prec_t prec = 256;
  for (long t = 0; t <= 50; ++t) {
    IntervalPoly ip = to_interval(cache.get(t), prec);
    for (int i = 0; i < 100; ++i) {
      double xd = unif(rng);
      mpq_class x(xd);
      Interval px = eval(ip, Interval::from_mpq(x, prec));
      // cos(t * arccos x) via the transcendental route
      BigFloat xf = BigFloat::from_mpq(x, prec, MPFR_RNDN);
      BigFloat theta(prec), want(prec);
      mpfr_acos(theta.raw(), xf.raw(), MPFR_RNDN);
      mpfr_mul_si(theta.raw(), theta.raw(), t, MPFR_RNDN);
      mpfr_cos(want.raw(), theta.raw(), MPFR_RNDN);
      BigFloat err = BigFloat::abs(
          BigFloat::sub(px.lo, want, prec));
      err = BigFloat::add(err, BigFloat::abs(BigFloat::sub(px.hi, want, prec)),
                          prec);
      BigFloat tol = BigFloat::mul_2si(BigFloat::from_long(1, prec), -100);
      CHECK(mpfr_cmp(err.raw(), tol.raw()) <= 0);
    }
  }
}

TEST_CASE("hyperbolic identity at random points outside [-1, 1]") {
  ChebCache cache;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(1.0 + 1e-6, 3.0);
  const mpfr_prec_t prec = 320;
  for (long t : {1L, 2L, 7L, 20L, 41L}) {
    for (int i = 0; i < 40; ++i) {
      mpq_class y(unif(rng));
      mpq_class x = (y + 1 / y) / 2;
      mpq_class yt = 1;
      for (long j = 0; j < t; ++j) yt *= y;
      mpq_class want = (yt + 1 / yt) / 2;
      CHECK(eval(cache.get(t), x) == want);
    }
  }
}

TEST_CASE("bounded by one inside the interval, at least one outside") {
  ChebCache cache;
  for (long t : {2L, 3L, 9L, 24L}) {
    for (const mpq_class& x : linear_grid(-1, 1, 257)) {
      mpq_class v = eval(cache.get(t), x);
      CHECK(abs(v) <= 1);
    }
    for (const mpq_class& x : log_grid(mpq_class(101, 100), 8, 64)) {
      CHECK(eval(cache.get(t), x) >= 1);
      CHECK(eval(cache.get(t), -x) * (t % 2 ? -1 : 1) >= 1);
    }
  }
}
