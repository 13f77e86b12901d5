// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flat.hpp"

#include <random>

using namespace flatexp;

namespace {

mpq_class pow_q(const mpq_class& b, long e) {
  mpq_class r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

FlatParams make_params(long ell, long s, long r, long k, const char* delta,
                       long beta = 1) {
  FlatParams p;
  p.beta = beta;
  p.delta = parse_delta(delta);
  p.ell = ell;
  p.s = s;
  p.r = r;
  p.k = k;
  return p;
}

}  // namespace

TEST_CASE("delta parsing") {
  CHECK(parse_delta("2^-8").rat == mpq_class(1, 256));
  CHECK(parse_delta("1/1000").rat == mpq_class(1, 1000));
  CHECK(parse_delta("0.125").rat == mpq_class(1, 8));
  // e^-10 is rationalized to the largest power of two at or below it
  DeltaSpec es = parse_delta("e^-10");
  CHECK(es.e_power);
  CHECK(es.e_exponent == 10);
  CHECK(es.rat == mpq_class(1) / pow_q(2, 15));
  CHECK_THROWS_AS(parse_delta("1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_delta("0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_delta("3/2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_delta("plums"), std::invalid_argument);
}

TEST_CASE("truncated exponential: base cases and telescoping") {
  CHECK(build_E(0) == RationalPoly::constant(1));
  CHECK(build_E(1) == RationalPoly({1, -1}));
  CHECK(build_E(2) == RationalPoly({1, -1, mpq_class(1, 2)}));
  mpq_class fact = 1;
  for (long ell = 1; ell <= 30; ++ell) {
    fact *= ell;
    RationalPoly diff = sub(build_E(ell), build_E(ell - 1));
    mpq_class want = mpq_class(ell % 2 ? -1 : 1) / fact;
    CHECK(diff == RationalPoly::monomial(want, ell));
    CHECK(eval(build_E(ell), 0) == 1);
  }
  // scaled variant composes x -> x/s
  RationalPoly es = build_E_scaled(4, 6);
  CHECK(es == compose(build_E(4), RationalPoly({0, mpq_class(1, 6)})));
}

TEST_CASE("signed binomial weights are a symmetric exact distribution") {
  for (long s : {2L, 4L, 10L, 64L}) {
    std::map<long, mpq_class> w = binom_weights(s);
    mpq_class total = 0;
    for (auto& [t, q] : w) {
      CHECK((t + s) % 2 == 0);
      CHECK(std::abs(t) <= s);
      CHECK(q == w.at(-t));
      total += q;
    }
    CHECK(total == 1);
  }
  // s = 4 by hand: 1/16, 4/16, 6/16, 4/16, 1/16 at t = -4, -2, 0, 2, 4
  std::map<long, mpq_class> w4 = binom_weights(4);
  CHECK(w4.at(0) == mpq_class(3, 8));
  CHECK(w4.at(2) == mpq_class(1, 4));
  CHECK(w4.at(4) == mpq_class(1, 16));
  CHECK(binom_tail(4, 2) == mpq_class(1, 8));
  CHECK(binom_tail(4, 4) == 0);
}

TEST_CASE("window polynomial: power identity, normalization, parity") {
  ChebCache cache;
  for (long s : {2L, 4L, 8L, 16L}) {
    RationalPoly g = build_G(s, s, cache);
    CHECK(g == RationalPoly::monomial(1, s));
  }
  for (long r : {2L, 4L, 8L}) {
    RationalPoly g = build_G(r, 16, cache);
    CHECK(g.degree() == r);
    // the cut tail is exactly the deficit at x = 1
    CHECK(eval(g, 1) == 1 - binom_tail(16, r));
    for (long j = 1; j <= r; j += 2) CHECK(g.coeff(j) == 0);
  }
  CHECK_THROWS_AS(build_G(3, 16, cache), std::invalid_argument);
  CHECK_THROWS_AS(build_G(18, 16, cache), std::invalid_argument);
}

TEST_CASE("fast composition path agrees with the reference") {
  ChebCache cache;
  FlatParams p = make_params(4, 6, 4, 20, "2^-4");
  CHECK(build_Q(p) == build_Q_reference(p, cache));
  FlatParams p2 = make_params(6, 10, 8, 40, "2^-6");
  CHECK(build_Q(p2) == build_Q_reference(p2, cache));
}

TEST_CASE("assembled polynomial: degree, leading coefficient, reassembly") {
  FlatParams p = make_params(8, 20, 8, 40, "2^-6");
  FlatApproxResult res = build_Phat(p);
  const mpq_class& delta = p.delta.rat;
  CHECK(res.p_hat.degree() == p.k + 2);
  CHECK(res.p_hat.lc() == mpq_class(1) / pow_q(2 * p.s, p.k + 2));
  // independent reassembly from the full composition
  RationalPoly want = scale(truncate(res.q_full, p.k), 1 - delta / 5);
  want = add(want, RationalPoly::monomial(
                       mpq_class(1) / pow_q(2 * p.s, p.k + 2), p.k + 2));
  want = add(want, RationalPoly::constant(delta / 10));
  CHECK(res.p_hat == want);
  CHECK(res.max_coeff_bits > 0);
}

TEST_CASE("parameter selection formulas") {
  ConstOverrides unit;
  unit.enabled = true;
  FlatParams p = select_params(1, parse_delta("e^-5"), unit, false);
  CHECK(p.ell == 10);
  CHECK(p.s == 10);
  CHECK(p.r == 10);
  CHECK(p.k == 10);

  // published constants, beta = 1, delta = 2^-20
  FlatParams pc =
      select_params(1, parse_delta("2^-20"), ConstOverrides{}, true);
  CHECK(pc.ell == 28);
  CHECK(pc.s == 277258874);
  CHECK(pc.r == 277260);
  CHECK(pc.k == 27725888);

  for (long i = 0; i < 8; ++i) {
    FlatParams q = select_params(mpq_class(i + 2, 2), parse_delta("2^-9"),
                                 unit, false);
    CHECK(q.ell % 2 == 0);
    CHECK(q.s % 2 == 0);
    CHECK(q.r % 2 == 0);
    CHECK(q.k % 2 == 0);
  }
}

TEST_CASE("parity and range validation") {
  CHECK_THROWS_AS(make_params(3, 6, 4, 20, "2^-4").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params(4, 7, 4, 20, "2^-4").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params(4, 6, 5, 20, "2^-4").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params(4, 6, 4, 21, "2^-4").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params(4, 6, 8, 20, "2^-4").validate(),
                  std::invalid_argument);  // r > s
  CHECK_NOTHROW(make_params(4, 6, 4, 20, "2^-4").validate());
}

TEST_CASE("shift constant and window accuracy enclosures") {
  FlatParams p = make_params(8, 20, 8, 40, "2^-8");
  Interval kap = p.kappa(192);
  // kappa = ln 256 / 100
  CHECK(kap.lo.to_double() == doctest::Approx(0.0554518).epsilon(1e-6));
  CHECK(mpfr_cmp(kap.lo.raw(), kap.hi.raw()) <= 0);
  Interval eps = p.eps(192);
  CHECK(eps.lo.to_double() == doctest::Approx(0.0130932).epsilon(1e-6));
}

TEST_CASE("realized polynomial approximates the exponential on the window") {
  FlatParams p = make_params(8, 100, 36, 90, "2^-6");
  FlatApproxResult res = build_Phat(p);
  realize_P(res, 384);
  CHECK(res.p_realized.degree() == p.k + 2);
  Interval kap = p.kappa(384);
  mpq_class eps_hi;
  mpfr_get_q(eps_hi.get_mpq_t(), p.eps(384).hi.raw());
  EscalatingEval ev(res.p_realized);
  for (mpq_class x : {mpq_class(0), mpq_class(1, 50), mpq_class(-1, 50)}) {
    Interval px = ev.eval_at(x, 384);
    Interval ex = iexp(ineg(Interval::from_mpq(x, 384)), 384);
    Interval diff = isub(px, ex, 384);
    BigFloat worst =
        mpfr_cmp(BigFloat::abs(diff.lo).raw(), BigFloat::abs(diff.hi).raw()) >= 0
            ? BigFloat::abs(diff.lo)
            : BigFloat::abs(diff.hi);
    CHECK(mpfr_cmp_q(worst.raw(), eps_hi.get_mpq_t()) <= 0);
  }
}

TEST_CASE("truncated-exponential bounds on their domains") {
  GridSpec grid;
  grid.window_points = 256;
  grid.log_points_per_decade = 64;
  for (long ell : {2L, 4L}) {
    PropertyReport rep = check_E_bounds(ell, grid);
    CHECK(rep.all_passed());
    CHECK(rep.records.size() == 5);
    for (auto& r : rep.records) CHECK(r.rigorous);
  }
}

TEST_CASE("truncation error bounds at a set with an active tail") {
  // deg Q = 480 while k = 140: the truncation genuinely removes terms
  FlatParams p = make_params(60, 30, 8, 140, "2^-4");
  FlatApproxResult res = build_Phat(p);
  CHECK(res.q_full.degree() == 480);
  GridSpec grid;
  grid.trunc_points = 256;
  PropertyReport rep = check_truncation_error(res, grid);
  CHECK(rep.all_passed());
  const PropertyRecord* cb = rep.find("coefficient-bound");
  REQUIRE(cb != nullptr);
  CHECK(cb->passed);
  CHECK(rep.find("inner-error") != nullptr);
}

TEST_CASE("flatness verification passes at a mid-size set") {
  FlatParams p = make_params(8, 100, 36, 90, "2^-6");
  FlatApproxResult res = build_Phat(p);
  realize_P(res, 384);
  GridSpec grid;
  grid.window_points = 512;
  grid.log_points_per_decade = 128;
  Interval kap = p.kappa(384);
  mpq_class eps_hi;
  mpfr_get_q(eps_hi.get_mpq_t(), p.eps(384).hi.raw());
  PropertyReport rep = verify_flat(res.p_realized, kap, mpq_class(1, 2),
                                   eps_hi, mpq_class(10 * p.s), grid);
  CHECK(rep.all_passed());
  // the between-grid record accounts for the derivative drift factor
  const PropertyRecord* between = rep.find("flat-window-between");
  REQUIRE(between != nullptr);
  CHECK(between->passed);
}

TEST_CASE("doubling ell never worsens the window margin") {
  GridSpec grid;
  grid.window_points = 512;
  double worst_prev = 0;
  bool first = true;
  for (long ell : {4L, 8L, 16L}) {
    FlatParams p = make_params(ell, 100, 36, 90, "2^-6");
    FlatApproxResult res = build_Phat(p);
    PropertyReport rep = verify_thm_approx(res, grid, false);
    const PropertyRecord* win = rep.find("window-accuracy");
    REQUIRE(win != nullptr);
    CHECK(win->passed);
    if (!first) CHECK(win->worst_margin_d <= worst_prev + 9.1e-13);
    worst_prev = win->worst_margin_d;
    first = false;
  }
}

TEST_CASE("baseline product construction degrees") {
  std::vector<long> d3 = baseline_degrees(3, mpq_class(1, 1000));
  REQUIRE(d3.size() == 3);
  CHECK(d3[0] == 28);
  CHECK(d3[1] == 56);
  CHECK(d3[2] == 112);
  RationalPoly prod = baseline_product(3, mpq_class(1, 1000));
  CHECK(prod.degree() == 28 + 56 + 112);
  // the product approximates exp(-x) at a few window points
  EscalatingEval ev(prod);
  for (mpq_class x : {mpq_class(0), mpq_class(3), mpq_class(10)}) {
    Interval px = ev.eval_at(x, 256);
    Interval ex = iexp(ineg(Interval::from_mpq(x, 256)), 256);
    Interval diff = isub(px, ex, 256);
    CHECK(BigFloat::abs(diff.lo).to_double() < 1e-3);
    CHECK(BigFloat::abs(diff.hi).to_double() < 1e-3);
  }
}

TEST_CASE("benchmark parameter recipe stays well formed") {
  for (long beta : {1L, 3L, 5L}) {
    FlatParams p = bench_params(beta, mpq_class(1, 1000));
    CHECK(p.ell % 2 == 0);
    CHECK(p.s % 2 == 0);
    CHECK(p.r % 2 == 0);
    CHECK(p.k % 2 == 0);
    CHECK(p.r < p.s);
    CHECK_NOTHROW(p.validate());
  }
}

TEST_CASE("parameter JSON round trip is lossless") {
  FlatParams p = make_params(8, 20, 8, 40, "e^-7", 3);
  p.overrides.enabled = true;
  p.overrides.c_s = mpq_class(1, 2);
  p.warnings.push_back("delta above the recommended threshold");
  FlatParams q = params_from_json(params_to_json(p));
  CHECK(q.beta == p.beta);
  CHECK(q.delta.rat == p.delta.rat);
  CHECK(q.delta.form == p.delta.form);
  CHECK(q.ell == p.ell);
  CHECK(q.s == p.s);
  CHECK(q.r == p.r);
  CHECK(q.k == p.k);
  CHECK(q.overrides.c_s == p.overrides.c_s);
  CHECK(q.warnings == p.warnings);
  CHECK(params_to_json(q) == params_to_json(p));
}

TEST_CASE("grid helpers") {
  std::vector<mpq_class> lin = linear_grid(-2, 2, 8);
  REQUIRE(lin.size() == 9);
  CHECK(lin.front() == -2);
  CHECK(lin.back() == 2);
  CHECK(lin[4] == 0);
  std::vector<mpq_class> lg = log_grid(mpq_class(1, 100), 100, 16);
  CHECK(lg.front() == mpq_class(1, 100));
  CHECK(lg.back() == 100);
  for (size_t i = 1; i < lg.size(); ++i) CHECK(lg[i] > lg[i - 1]);
}
