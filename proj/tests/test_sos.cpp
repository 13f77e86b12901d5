// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sos.hpp"

#include <cmath>
#include <random>

using namespace flatexp;

namespace {

std::mt19937_64 rng(20260815);

mpq_class rand_q(long lo, long hi) {
  std::uniform_int_distribution<long> num(lo, hi);
  std::uniform_int_distribution<long> den(1, 9);
  mpq_class q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

// random product of distinct irreducible quadratics x^2 + bx + c
// (b^2 < 4c), scaled by a rational in (0, 1]; distinctness keeps every root
// simple so the finder converges
RationalPoly rand_rootless(long pairs) {
  RationalPoly p = RationalPoly::constant(1);
  for (long i = 0; i < pairs; ++i) {
    mpq_class b = rand_q(-3, 3);
    mpq_class c = b * b / 4 + mpq_class(1 + (rng() % 5), 1 + (rng() % 3)) +
                  mpq_class(i, 17);
    p = mul(p, RationalPoly({c, b, 1}));
  }
  std::uniform_int_distribution<long> num(1, 16);
  return scale(p, mpq_class(num(rng), 16));
}

double eval_d(const RationalPoly& p, double x) {
  double acc = 0;
  for (long j = static_cast<long>(p.degree()); j >= 0; --j)
    acc = acc * x + p.coeff(j).get_d();
  return acc;
}

}  // namespace

TEST_CASE("integral form of R: printed vs corrected constants") {
  // for p = 1 the printed form misses by exactly -(x-y)^2 / 2000
  ReconcileReport rep = reconcile_r_forms(RationalPoly::constant(1));
  CHECK_FALSE(rep.printed_exact);
  CHECK(rep.corrected_exact);
  CHECK(rep.corrected_inner == mpq_class(999, 1000));
  RationalPoly2 want;
  want.set(2, 0, mpq_class(-1, 2000));
  want.set(1, 1, mpq_class(1, 1000));
  want.set(0, 2, mpq_class(-1, 2000));
  CHECK(rep.residual_printed == want);
  CHECK(rep.residual_corrected.is_zero());

  for (const RationalPoly& p :
       {RationalPoly::x(), RationalPoly::monomial(1, 2), build_E(2)}) {
    ReconcileReport r = reconcile_r_forms(p);
    CHECK(r.corrected_exact);
    CHECK(r.residual_corrected.is_zero());
    CHECK_FALSE(r.printed_exact);
  }
}

TEST_CASE("direct R: symmetric, vanishing on the diagonal, expected degree") {
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<mpq_class> c;
    long deg = 1 + (trial % 4);
    for (long j = 0; j <= deg; ++j) c.push_back(rand_q(-5, 5));
    RationalPoly p{std::move(c)};
    if (p.degree() < 0) continue;
    RationalPoly q = antiderivative(p);
    RationalPoly2 R = build_r_direct(p, q);
    CHECK(symmetric2(R));
    CHECK(restrict_diag(R) == RationalPoly::zero());
    CHECK(R.total_degree() <= static_cast<long>(p.degree()) + 4);
  }
}

TEST_CASE("conjugate-pair splitting reconstructs the polynomial") {
  for (int trial = 0; trial < 50; ++trial) {
    RationalPoly p = rand_rootless(1 + (trial % 3));
    std::pair<BigPoly, BigPoly> qs = pair_roots_sos(p, 256);
    CHECK(qs.first.degree() == static_cast<long>(p.degree()) / 2);
    // q1^2 + q2^2 == p pointwise, to well below the root-finder residual
    for (double x : {-2.5, -1.0, -0.125, 0.0, 0.5, 1.75, 3.0}) {
      BigFloat bx = BigFloat::from_double(x, 256);
      BigFloat v1 = eval(qs.first, bx);
      BigFloat v2 = eval(qs.second, bx);
      double got = v1.to_double() * v1.to_double() + v2.to_double() * v2.to_double();
      double want = eval_d(p, x);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
    // and with full precision at one rational point
    BigFloat bx = BigFloat::from_mpq(mpq_class(3, 7), 256, MPFR_RNDN);
    BigFloat v1 = eval(qs.first, bx);
    BigFloat v2 = eval(qs.second, bx);
    BigFloat got = BigFloat::add(BigFloat::mul(v1, v1, 256, MPFR_RNDN),
                                 BigFloat::mul(v2, v2, 256, MPFR_RNDN), 256,
                                 MPFR_RNDN);
    BigFloat want = BigFloat::from_mpq(eval(p, mpq_class(3, 7)), 256, MPFR_RNDN);
    BigFloat rel = BigFloat::div(BigFloat::sub(got, want, 256, MPFR_RNDN),
                                 want, 256, MPFR_RNDN);
    CHECK(std::abs(rel.to_double()) <= std::pow(2.0, -100));
  }
}

TEST_CASE("conjugate-pair splitting rejects bad inputs") {
  CHECK_THROWS_AS(pair_roots_sos(RationalPoly({2, 0, 2}), 192),
                  std::invalid_argument);  // leading coefficient 2
  CHECK_THROWS_AS(pair_roots_sos(RationalPoly({0, 1, 0, 1}), 192),
                  std::invalid_argument);  // odd degree
  // a real root shows up as a near-axis rejection or a count failure
  CHECK_THROWS(pair_roots_sos(RationalPoly({-1, 0, 1}), 192));
}

TEST_CASE("coefficient-boundedness check") {
  for (long d : {2L, 5L, 9L}) {
    mpq_class fact = 1;
    for (long j = 2; j <= d; ++j) fact *= j;
    RationalPoly2 w;
    w.set(static_cast<int>(d), 0, 1 / fact);
    BigPoly2 bw = to_big2(w, 192);
    // 1/d! rounds at 192 bits, so allow an ulp of headroom on the exact
    // boundary; the check itself rounds conservatively
    BoundedCheck ok =
        check_bounded(bw, d, BigFloat::from_double(1.0 + 1e-9, 192), 192);
    CHECK(ok.ok);
    CHECK(ok.degree == d);
    CHECK(ok.worst_ratio.to_double() == doctest::Approx(1.0).epsilon(1e-6));
    // any C below the achieved ratio must fail
    BoundedCheck tight =
        check_bounded(bw, d, BigFloat::from_double(0.999, 192), 192);
    CHECK_FALSE(tight.ok);
    // degree overflow must fail even with a huge C
    BoundedCheck deg =
        check_bounded(bw, d - 1, BigFloat::from_double(1e30, 192), 192);
    CHECK_FALSE(deg.ok);
  }
}

TEST_CASE("product composition of square lists") {
  // A = (x^2+y^2)/2, B = (x^2-y^2)/2, C = (1+(x-y)^2)/2, D = (1-(x-y)^2)/2
  auto sq = [](const RationalPoly2& w) {
    return std::vector<BigPoly2>{to_big2(w, 256)};
  };
  RationalPoly2 wx, wy, w1, wxy;
  wx.set(1, 0, 1);
  wy.set(0, 1, 1);
  w1.set(0, 0, 1);
  wxy.set(1, 0, 1);
  wxy.set(0, 1, -1);
  auto [ac_minus, ac_plus] = acbd_compose(sq(wx), sq(wy), sq(w1), sq(wxy), 256);
  CHECK(!ac_minus.empty());
  CHECK(!ac_plus.empty());
  for (double xd : {-1.5, 0.25, 2.0}) {
    for (double yd : {-0.5, 1.0}) {
      double A = (xd * xd + yd * yd) / 2, B = (xd * xd - yd * yd) / 2;
      double C = (1 + (xd - yd) * (xd - yd)) / 2,
             D = (1 - (xd - yd) * (xd - yd)) / 2;
      BigFloat bx = BigFloat::from_double(xd, 256);
      BigFloat by = BigFloat::from_double(yd, 256);
      double got_minus = 0, got_plus = 0;
      for (auto& s : ac_minus) {
        double v = eval_big2(s, bx, by).to_double();
        got_minus += v * v;
      }
      for (auto& s : ac_plus) {
        double v = eval_big2(s, bx, by).to_double();
        got_plus += v * v;
      }
      CHECK(got_minus == doctest::Approx(A * C - B * D).epsilon(1e-12));
      CHECK(got_plus == doctest::Approx(A * C + B * D).epsilon(1e-12));
    }
  }
}

TEST_CASE("bound arithmetic survives products of bounded squares") {
  // q = x + y is (1, 1)-bounded; r = (x - y)^2 / 2 is (2, 2)-bounded (the
  // mixed coefficient is 1 = 2/2!); their product must then be
  // (3, 1 * 2 * 2^3)-bounded by coefficient convolution
  RationalPoly2 q, r;
  q.set(1, 0, 1);
  q.set(0, 1, 1);
  r.set(2, 0, mpq_class(1, 2));
  r.set(1, 1, -1);
  r.set(0, 2, mpq_class(1, 2));
  BigPoly2 bq = to_big2(q, 256), br = to_big2(r, 256);
  CHECK(check_bounded(bq, 1, BigFloat::from_long(1, 256), 256).ok);
  CHECK_FALSE(check_bounded(br, 2, BigFloat::from_long(1, 256), 256).ok);
  CHECK(check_bounded(br, 2, BigFloat::from_long(2, 256), 256).ok);
  BigPoly2 prod = big2_mul(bq, br);
  CHECK(check_bounded(prod, 3, BigFloat::from_long(16, 256), 256).ok);
}

TEST_CASE("affine substitution toward either corner keeps squares bounded") {
  // u -> ((1+l) x + (1-l) y)/2 with l in [0,1]: convex weights preserve the
  // factorial envelope
  RationalPoly u = RationalPoly({mpq_class(1, 2), 1, mpq_class(1, 2)});
  std::vector<BigPoly> squares = {to_big(u, 256)};
  for (bool toward_x : {true, false}) {
    std::vector<BigPoly2> out =
        sos_for_shifted(squares, mpq_class(1, 3), toward_x, 256);
    REQUIRE(out.size() == 1);
    CHECK(check_bounded(out[0], 2, BigFloat::from_double(1.0 + 1e-9, 256), 256).ok);
    // spot value: u evaluated at the blended point
    double l = 1.0 / 3, x = 0.7, y = -0.4;
    double pt = toward_x ? ((1 + l) * x + (1 - l) * y) / 2
                         : ((1 - l) * x + (1 + l) * y) / 2;
    double want = 0.5 + pt + 0.5 * pt * pt;
    double got = eval_big2(out[0], BigFloat::from_double(x, 256),
                           BigFloat::from_double(y, 256))
                     .to_double();
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("lambda-family integration matches a closed-form Gram integral") {
  // family: sqrt(lambda) * (x + lambda y); integral over [0,1] of
  // lambda (x + lambda y)^2 = x^2/2 + 2xy/3 + y^2/4
  LambdaSquare fam;
  fam.alpha2 = BigFloat::from_long(1, 256);
  fam.weight = {BigFloat::from_long(0, 256), BigFloat::from_long(1, 256)};
  fam.coeffs[{1, 0}] = {BigFloat::from_long(1, 256)};
  fam.coeffs[{0, 1}] = {BigFloat::from_long(0, 256), BigFloat::from_long(1, 256)};
  GramDiag diag;
  std::vector<BigPoly2> out = integrate_sos_family({fam}, 256, &diag);
  CHECK(diag.basis_size == 2);
  CHECK(diag.rank == 2);
  for (double xd : {-1.0, 0.5, 2.0}) {
    for (double yd : {-0.75, 1.25}) {
      double want = xd * xd / 2 + 2 * xd * yd / 3 + yd * yd / 4;
      double got = 0;
      for (auto& s : out) {
        double v = eval_big2(s, BigFloat::from_double(xd, 256),
                             BigFloat::from_double(yd, 256))
                       .to_double();
        got += v * v;
      }
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("full certificate for a small truncated exponential") {
  RationalPoly p = build_E(6);
  RCertResult rc = build_R_certificate(p, 320, 11);
  CHECK(rc.cert.k_count >= 1);
  CHECK(rc.cert.k_count <= 6 * 36);
  CHECK(rc.cert.max_coeff_residual.to_double() <= std::pow(2.0, -100));
  CHECK(rc.gram.rank <= rc.gram.basis_size);

  CertReport rep = verify_certificate(rc.R, rc.cert, 25, 320, 7);
  CHECK(rep.pass);
  CHECK(rep.bounded_ok);
  CHECK(rep.points_tested == 25);
  CHECK(rep.max_coeff_residual.to_double() <= std::pow(2.0, -100));
  CHECK(rep.max_point_residual.to_double() <= std::pow(2.0, -100));

  // serialization round trip reverifies and reserializes identically
  std::string text = certificate_to_json(rc);
  RCertResult back = certificate_from_json(text);
  CHECK(back.cert.k_count == rc.cert.k_count);
  CHECK(back.R == rc.R);
  CertReport rep2 = verify_certificate(back.R, back.cert, 25, 320, 7);
  CHECK(rep2.pass);
  CHECK(certificate_to_json(back) == text);
}

TEST_CASE("certificate from a constructed instance records provenance") {
  ConstOverrides unit;
  unit.enabled = true;
  FlatParams params = select_params(1, parse_delta("e^-5"), unit, false);
  FlatApproxResult res = build_Phat(params);
  RCertResult rc = build_R_certificate(res, 320, 3);
  CHECK(rc.cert.has_provenance);
  CHECK(rc.cert.provenance.ell == 10);
  CHECK(rc.cert.provenance.k == 10);
  CertReport rep = verify_certificate(rc.R, rc.cert, 20, 320, 5);
  CHECK(rep.pass);
  std::string text = certificate_to_json(rc);
  RCertResult back = certificate_from_json(text);
  CHECK(back.cert.has_provenance);
  CHECK(back.cert.provenance.s == 10);
}

TEST_CASE("certificate pipeline rejects out-of-contract polynomials") {
  // leading coefficient above 1/99 breaks the derivative-shift split
  CHECK_THROWS_AS(build_R_certificate(build_E(2), 256, 1), std::exception);
  // odd degree
  CHECK_THROWS_AS(build_R_certificate(RationalPoly({1, 1, 0, 1}), 256, 1),
                  std::exception);
}
