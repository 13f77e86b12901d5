// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// The certificate pipeline: pair conjugate roots of 99P +- P' into complex
// square factors, slice the drift polynomial R into a lambda-family of
// squares, integrate the family's Gram matrix exactly over lambda, and
// refactor the result into explicit squares with verified residuals.

#include "sos.hpp"

#include "jsonio.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace flatexp {

namespace {

// univariate polynomial in lambda with BigFloat coefficients
using LPoly = std::vector<BigFloat>;
// bivariate polynomial whose coefficients are polynomials in lambda
using LPoly2 = std::map<std::pair<int, int>, LPoly>;

LPoly lpoly_mul(const LPoly& a, const LPoly& b, mpfr_prec_t prec) {
  if (a.empty() || b.empty()) return {};
  LPoly out(a.size() + b.size() - 1, BigFloat::from_long(0, prec));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] = BigFloat::add(out[i + j], BigFloat::mul(a[i], b[j], prec), prec);
  return out;
}

// exact integral over [0,1]: sum of coeff_t / (t+1)
BigFloat lpoly_integral01(const LPoly& a, mpfr_prec_t prec) {
  BigFloat s = BigFloat::from_long(0, prec);
  for (size_t t = 0; t < a.size(); ++t) {
    BigFloat term = BigFloat::div(a[t], BigFloat::from_long((long)t + 1, prec), prec);
    s = BigFloat::add(s, term, prec);
  }
  return s;
}

LPoly2 lpoly2_mul(const LPoly2& a, const LPoly2& b, mpfr_prec_t prec) {
  LPoly2 out;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) {
      std::pair<int, int> k{ka.first + kb.first, ka.second + kb.second};
      LPoly prod = lpoly_mul(va, vb, prec);
      auto it = out.find(k);
      if (it == out.end()) {
        out.emplace(k, std::move(prod));
      } else {
        LPoly& dst = it->second;
        if (dst.size() < prod.size()) dst.resize(prod.size(), BigFloat::from_long(0, prec));
        for (size_t t = 0; t < prod.size(); ++t)
          dst[t] = BigFloat::add(dst[t], prod[t], prec);
      }
    }
  return out;
}

// q((1+-lambda)/2 x + (1-+lambda)/2 y) with lambda symbolic: the monomial
// x^al y^be (al+be = t) picks up q_t * C(t,al) / 2^t * (1+l)^al (1-l)^be,
// an exact integer polynomial in lambda scaled by a dyadic rational.
LPoly2 affine_lambda_sub(const BigPoly& q, bool toward_x, mpfr_prec_t prec) {
  LPoly2 out;
  long n = q.degree();
  for (long t = 0; t <= n; ++t) {
    if (q.c[t].is_zero()) continue;
    for (long al = 0; al <= t; ++al) {
      long be = t - al;
      // (1+lambda)^a (1-lambda)^b exactly, as integers
      long pa = toward_x ? al : be;  // exponent of (1+lambda)
      long pb = toward_x ? be : al;  // exponent of (1-lambda)
      std::vector<mpz_class> w(t + 1, 0);
      w[0] = 1;
      long deg = 0;
      for (long i = 0; i < pa; ++i) {  // multiply by (1+lambda)
        for (long d = deg; d >= 0; --d) w[d + 1] += w[d];
        ++deg;
      }
      for (long i = 0; i < pb; ++i) {  // multiply by (1-lambda)
        for (long d = deg; d >= 0; --d) w[d + 1] -= w[d];
        ++deg;
      }
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), t, al);
      mpq_class scale(binom, mpz_class(1) << t);  // C(t,al) / 2^t
      scale.canonicalize();
      BigFloat factor = BigFloat::mul(q.c[t], BigFloat::from_mpq(scale, prec, MPFR_RNDN), prec);
      LPoly lam(deg + 1, BigFloat(prec));
      for (long d = 0; d <= deg; ++d)
        lam[d] = BigFloat::mul(factor, BigFloat::from_mpz(w[d], prec, MPFR_RNDN), prec);
      auto key = std::make_pair((int)al, (int)be);
      auto it = out.find(key);
      if (it == out.end()) {
        out.emplace(key, std::move(lam));
      } else {
        LPoly& dst = it->second;
        if (dst.size() < lam.size()) dst.resize(lam.size(), BigFloat::from_long(0, prec));
        for (size_t d = 0; d < lam.size(); ++d)
          dst[d] = BigFloat::add(dst[d], lam[d], prec);
      }
    }
  }
  return out;
}

LPoly2 lpoly2_from_rational(const std::map<std::pair<int, int>, std::vector<mpq_class>>& m,
                            mpfr_prec_t prec) {
  LPoly2 out;
  for (const auto& [k, lam] : m) {
    LPoly v;
    v.reserve(lam.size());
    for (const mpq_class& q : lam) v.push_back(BigFloat::from_mpq(q, prec, MPFR_RNDN));
    out.emplace(k, std::move(v));
  }
  return out;
}

std::string cplx_str(const Cplx& z) {
  std::ostringstream os;
  os << z.re.to_double() << (z.im.sign() < 0 ? " - " : " + ")
     << BigFloat::abs(z.im).to_double() << "i";
  return os.str();
}

BigFloat factorial_big(long n, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), (unsigned long)n);
  return BigFloat::from_mpz(f, prec, rnd);
}

// horner evaluation of a rational polynomial at a LambdaPoly2 argument
LambdaPoly2 lp_horner(const RationalPoly& p, const LambdaPoly2& u) {
  LambdaPoly2 res{RationalPoly2()};
  res[0].set(0, 0, p.coeff(p.degree()));
  for (long j = p.degree() - 1; j >= 0; --j) {
    res = lp_mul(res, u);
    if (res.empty()) res.push_back(RationalPoly2());
    RationalPoly2 cj;
    cj.set(0, 0, p.coeff(j));
    res[0] = add2(res[0], cj);
  }
  return res;
}

std::vector<std::pair<BigFloat, BigFloat>> random_points(long n, uint64_t seed,
                                                         mpfr_prec_t prec) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<BigFloat, BigFloat>> pts;
  pts.reserve(n);
  auto draw = [&rng, prec]() {
    // dyadic rational in [-2, 2], exactly representable
    double u = (double)(rng() >> 11) / 9007199254740992.0;  // [0,1)
    return BigFloat::from_double(-2.0 + 4.0 * u, prec);
  };
  for (long i = 0; i < n; ++i) {
    BigFloat x = draw();
    BigFloat y = draw();
    pts.emplace_back(std::move(x), std::move(y));
  }
  return pts;
}

struct ResidualPair {
  BigFloat coeff;
  BigFloat point;
};

// |sum of squares - R| coefficientwise (relative to the largest |R| coeff)
// and at sample points (relative to max(1, |R(x,y)|)).
ResidualPair residuals_against(const RationalPoly2& R,
                               const std::vector<BigPoly2>& squares,
                               const std::vector<std::pair<BigFloat, BigFloat>>& pts,
                               mpfr_prec_t prec) {
  BigPoly2 sum;
  sum.precision_bits = prec;
  for (const BigPoly2& s : squares) sum = big2_add(sum, big2_mul(s, s));
  BigPoly2 target = to_big2(R, prec);
  BigPoly2 diff = big2_sub(sum, target);
  BigFloat scale = BigFloat::from_long(0, prec);
  for (const auto& [k, v] : target.c) {
    BigFloat a = BigFloat::abs(v);
    if (scale < a) scale = a;
  }
  if (scale.is_zero()) scale = BigFloat::from_long(1, prec);
  BigFloat worst = BigFloat::from_long(0, prec);
  for (const auto& [k, v] : diff.c) {
    BigFloat a = BigFloat::abs(v);
    if (worst < a) worst = a;
  }
  ResidualPair out{BigFloat::div(worst, scale, prec), BigFloat::from_long(0, prec)};
  for (const auto& [x, y] : pts) {
    BigFloat sq = BigFloat::from_long(0, prec);
    for (const BigPoly2& s : squares) {
      BigFloat v = eval_big2(s, x, y);
      sq = BigFloat::add(sq, BigFloat::mul(v, v, prec), prec);
    }
    BigFloat rv = eval_big2(target, x, y);
    BigFloat d = BigFloat::abs(BigFloat::sub(sq, rv, prec));
    BigFloat sc = BigFloat::abs(rv);
    if (sc < BigFloat::from_long(1, prec)) sc = BigFloat::from_long(1, prec);
    d = BigFloat::div(d, sc, prec);
    if (out.point < d) out.point = d;
  }
  return out;
}

}  // namespace

std::pair<BigPoly, BigPoly> pair_roots_sos(const RationalPoly& p,
                                           const RootSet& roots,
                                           mpfr_prec_t prec) {
  long n = p.degree();
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("pair_roots_sos: degree must be even and >= 2, got " +
                                std::to_string(n));
  mpq_class lc = p.lc();
  if (lc <= 0 || lc > 1)
    throw std::invalid_argument(
        "pair_roots_sos: leading coefficient must lie in (0, 1]; got " +
        mpq_num_str(lc) + "/" + mpq_den_str(lc) +
        " (factor out the leading coefficient and rescale: p = lc * (p / lc))");
  if ((long)roots.roots.size() != n)
    throw std::invalid_argument("pair_roots_sos: root set carries " +
                                std::to_string(roots.roots.size()) +
                                " roots for degree " + std::to_string(n));
  // every root must clear the real axis decisively
  for (const Cplx& z : roots.roots) {
    BigFloat mag = cabs(z, 64);
    BigFloat lim = BigFloat::add(BigFloat::from_long(1, 64), mag, 64);
    lim = BigFloat::mul_2si(lim, -(long)(prec / 4));
    if (BigFloat::abs(z.im) <= lim)
      throw std::domain_error(
          "pair_roots_sos: root " + cplx_str(z) +
          " is within 2^-" + std::to_string(prec / 4) +
          " of the real axis; the polynomial must have no real roots");
  }
  if (roots.pairing.size() * 2 != roots.roots.size())
    throw std::domain_error(
        "pair_roots_sos: conjugate pairing is incomplete (" +
        std::to_string(roots.pairing.size()) + " pairs for " +
        std::to_string(roots.roots.size()) + " roots)");

  // q(x) = sqrt(lc) * prod over upper-half-plane roots of (x - z), built in
  // descending-degree order so multiplying by (x - z) is the in-place update
  // new[k] = old[k] - z * old[k-1] with the leading 1 untouched
  std::vector<Cplx> coeff;
  coeff.emplace_back(BigFloat::from_long(1, prec), BigFloat::from_long(0, prec));
  for (const auto& pr : roots.pairing) {
    const Cplx& cand = roots.roots[pr.first];
    const Cplx& z = cand.im.sign() > 0 ? cand : roots.roots[pr.second];
    coeff.emplace_back(BigFloat::from_long(0, prec), BigFloat::from_long(0, prec));
    for (size_t k = coeff.size() - 1; k > 0; --k)
      coeff[k] = csub(coeff[k], cmul(z, coeff[k - 1], prec), prec);
  }
  std::reverse(coeff.begin(), coeff.end());  // ascending for BigPoly

  BigFloat root_lc = BigFloat::sqrt(BigFloat::from_mpq(lc, prec, MPFR_RNDN), prec);
  BigPoly q1, q2;
  q1.precision_bits = q2.precision_bits = prec;
  q1.c.reserve(coeff.size());
  q2.c.reserve(coeff.size());
  for (const Cplx& ck : coeff) {
    q1.c.push_back(BigFloat::mul(ck.re, root_lc, prec));
    q2.c.push_back(BigFloat::mul(ck.im, root_lc, prec));
  }
  return {std::move(q1), std::move(q2)};
}

std::pair<BigPoly, BigPoly> pair_roots_sos(const RationalPoly& p, mpfr_prec_t prec) {
  RootSet rs = find_roots(p, prec);
  if (!rs.converged)
    throw std::runtime_error("pair_roots_sos: root finding did not converge: " + rs.note);
  return pair_roots_sos(p, rs, prec);
}

BoundedCheck check_bounded(const BigPoly2& p, long d, const BigFloat& C,
                           mpfr_prec_t prec) {
  BoundedCheck out;
  out.d_bound = d;
  out.degree = p.total_degree();
  out.worst_ratio = BigFloat::from_long(0, prec);
  if (out.degree > d) {
    out.ok = false;
    return out;
  }
  out.ok = true;
  for (const auto& [k, v] : p.c) {
    if (v.is_zero()) continue;
    long dprime = k.first + k.second;
    BigFloat lhs = BigFloat::mul(BigFloat::abs(v), factorial_big(dprime, prec, MPFR_RNDU),
                                 prec, MPFR_RNDU);
    BigFloat ratio = BigFloat::div(lhs, C, prec, MPFR_RNDU);
    if (out.worst_ratio < ratio) {
      out.worst_ratio = ratio;
      out.worst_dx = k.first;
      out.worst_dy = k.second;
    }
  }
  if (out.worst_ratio > BigFloat::from_long(1, prec)) out.ok = false;
  return out;
}

RationalPoly2 build_r_direct(const RationalPoly& p, const RationalPoly& q) {
  if (!(derivative(q) == p))
    throw std::invalid_argument("build_r_direct: q' != p (q must be an antiderivative of p)");
  RationalPoly2 xmy;  // x - y
  xmy.set(1, 0, 1);
  xmy.set(0, 1, -1);
  RationalPoly2 one;
  one.set(0, 0, 1);
  RationalPoly2 qx = embed_affine(q, 1, 0, 0);
  RationalPoly2 qy = embed_affine(q, 0, 1, 0);
  RationalPoly2 px = embed_affine(p, 1, 0, 0);
  RationalPoly2 py = embed_affine(p, 0, 1, 0);
  RationalPoly2 sq = mul2(xmy, xmy);
  RationalPoly2 cubic = add2(one, scale2(sq, mpq_class(1, 4)));
  RationalPoly2 term1 = mul2(scale2(xmy, mpq_class(1, 2)),
                             mul2(cubic, sub2(qx, qy)));
  RationalPoly2 term2 = scale2(mul2(sq, add2(px, py)), mpq_class(1, 4000));
  return sub2(term1, term2);
}

RationalPoly2 build_r_integral(const RationalPoly& p, RIntegralForm form) {
  if (p.is_zero()) return RationalPoly2();
  RationalPoly pd = derivative(p);
  RationalPoly2 z, a;
  z.set(1, 0, mpq_class(1, 2));
  z.set(0, 1, mpq_class(1, 2));
  a.set(1, 0, mpq_class(1, 2));
  a.set(0, 1, mpq_class(-1, 2));
  RationalPoly2 a2 = mul2(a, a);
  RationalPoly2 a3 = mul2(a2, a);
  RationalPoly2 a4 = mul2(a2, a2);

  mpq_class c_inner = form == RIntegralForm::printed ? mpq_class(499, 500)
                                                     : mpq_class(999, 1000);
  RationalPoly2 factor1 = add2(scale2(a2, c_inner), a4);
  RationalPoly2 a3_milli = scale2(a3, mpq_class(1, 1000));

  LambdaPoly2 weight;  // printed: 2 - lambda; corrected: lambda
  if (form == RIntegralForm::printed) {
    RationalPoly2 two;
    two.set(0, 0, 2);
    RationalPoly2 minus_one;
    minus_one.set(0, 0, -1);
    weight = {two, minus_one};
  } else {
    RationalPoly2 zero2, one2;
    one2.set(0, 0, 1);
    weight = {zero2, one2};
  }

  RationalPoly2 total;
  for (int branch = 0; branch < 2; ++branch) {
    bool plus_dir = branch == 0;  // z + lambda a vs z - lambda a
    LambdaPoly2 u{z, plus_dir ? a : scale2(a, -1)};
    LambdaPoly2 p_of_u = lp_horner(p, u);
    LambdaPoly2 pd_of_u = pd.is_zero() ? LambdaPoly2{RationalPoly2()} : lp_horner(pd, u);

    LambdaPoly2 main_term = lp_mul(LambdaPoly2{factor1}, p_of_u);
    LambdaPoly2 deriv_term = lp_mul(lp_mul(weight, LambdaPoly2{a3_milli}), pd_of_u);
    // printed: minus sign on both branches; corrected: minus on the forward
    // branch, plus on the mirrored one
    mpq_class sgn = -1;
    if (form == RIntegralForm::corrected && !plus_dir) sgn = 1;
    LambdaPoly2 integrand = lp_add(main_term, lp_scale(deriv_term, sgn));
    total = add2(total, integrate_in_lambda(integrand));
  }
  return total;
}

ReconcileReport reconcile_r_forms(const RationalPoly& p) {
  ReconcileReport rep;
  RationalPoly q = antiderivative(p);
  rep.r_direct = build_r_direct(p, q);
  rep.residual_printed = sub2(build_r_integral(p, RIntegralForm::printed), rep.r_direct);
  rep.residual_corrected = sub2(build_r_integral(p, RIntegralForm::corrected), rep.r_direct);
  rep.printed_exact = rep.residual_printed.is_zero();
  rep.corrected_exact = rep.residual_corrected.is_zero();
  return rep;
}

std::pair<std::vector<BigPoly2>, std::vector<BigPoly2>> acbd_compose(
    const std::vector<BigPoly2>& sos_a_plus_b,
    const std::vector<BigPoly2>& sos_a_minus_b,
    const std::vector<BigPoly2>& sos_c_plus_d,
    const std::vector<BigPoly2>& sos_c_minus_d, mpfr_prec_t prec) {
  BigFloat half = BigFloat::from_mpq(mpq_class(1, 2), prec, MPFR_RNDN);
  BigFloat inv_sqrt2 = BigFloat::sqrt(half, prec);
  auto cross = [&](const std::vector<BigPoly2>& qs, const std::vector<BigPoly2>& rs,
                   std::vector<BigPoly2>& out) {
    for (const BigPoly2& q : qs)
      for (const BigPoly2& r : rs)
        out.push_back(big2_scale(big2_mul(q, r), inv_sqrt2));
  };
  std::vector<BigPoly2> ac_minus_bd, ac_plus_bd;
  cross(sos_a_minus_b, sos_c_plus_d, ac_minus_bd);
  cross(sos_a_plus_b, sos_c_minus_d, ac_minus_bd);
  cross(sos_a_minus_b, sos_c_minus_d, ac_plus_bd);
  cross(sos_a_plus_b, sos_c_plus_d, ac_plus_bd);
  return {std::move(ac_minus_bd), std::move(ac_plus_bd)};
}

std::vector<BigPoly2> sos_for_shifted(const std::vector<BigPoly>& squares,
                                      const mpq_class& lambda, bool toward_x,
                                      mpfr_prec_t prec) {
  if (lambda < 0 || lambda > 1)
    throw std::invalid_argument("sos_for_shifted: lambda must lie in [0, 1]");
  mpq_class ax = toward_x ? mpq_class((1 + lambda) / 2) : mpq_class((1 - lambda) / 2);
  mpq_class by = 1 - ax;
  std::vector<BigPoly2> out;
  out.reserve(squares.size());
  for (const BigPoly& q : squares) {
    BigPoly2 s;
    s.precision_bits = prec;
    long n = q.degree();
    std::vector<mpq_class> axp(n + 1), byp(n + 1);
    axp[0] = byp[0] = 1;
    for (long i = 1; i <= n; ++i) {
      axp[i] = axp[i - 1] * ax;
      byp[i] = byp[i - 1] * by;
    }
    for (long t = 0; t <= n; ++t) {
      if (q.c[t].is_zero()) continue;
      for (long al = 0; al <= t; ++al) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), t, al);
        mpq_class w = mpq_class(binom) * axp[al] * byp[t - al];
        if (w == 0) continue;
        s.add_to((int)al, (int)(t - al),
                 BigFloat::mul(q.c[t], BigFloat::from_mpq(w, prec, MPFR_RNDN), prec), prec);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<BigPoly2> integrate_sos_family(
    const std::vector<LambdaSquare>& family, mpfr_prec_t prec, GramDiag* diag) {
  // collect the monomial basis
  std::set<std::pair<int, int>> keys;
  for (const LambdaSquare& f : family)
    for (const auto& [k, v] : f.coeffs) keys.insert(k);
  std::vector<std::pair<int, int>> basis(keys.begin(), keys.end());
  long N = (long)basis.size();
  std::map<std::pair<int, int>, long> index;
  for (long i = 0; i < N; ++i) index[basis[i]] = i;

  // Gram matrix: G[i][j] = sum over squares of alpha2 * int_0^1 weight *
  // c_i(lambda) * c_j(lambda) d lambda, exact termwise up to rounding.
  std::vector<std::vector<BigFloat>> G(N);
  for (long i = 0; i < N; ++i)
    G[i].assign(N, BigFloat::from_long(0, prec));
  for (const LambdaSquare& f : family) {
    std::vector<std::pair<long, const LPoly*>> entries;
    entries.reserve(f.coeffs.size());
    for (const auto& [k, v] : f.coeffs) entries.emplace_back(index.at(k), &v);
    for (size_t a = 0; a < entries.size(); ++a)
      for (size_t b = a; b < entries.size(); ++b) {
        LPoly prod = lpoly_mul(*entries[a].second, *entries[b].second, prec);
        prod = lpoly_mul(prod, f.weight, prec);
        BigFloat val = BigFloat::mul(f.alpha2, lpoly_integral01(prod, prec), prec);
        long i = entries[a].first, j = entries[b].first;
        G[i][j] = BigFloat::add(G[i][j], val, prec);
        if (i != j) G[j][i] = BigFloat(G[i][j]);
      }
  }

  // diagonally pivoted Cholesky with clamping of rounding-level negatives
  std::vector<long> perm(N);
  for (long i = 0; i < N; ++i) perm[i] = i;
  std::vector<std::vector<BigFloat>> L(N);
  for (long i = 0; i < N; ++i) L[i].assign(N, BigFloat::from_long(0, prec));
  std::vector<BigFloat> d(N, BigFloat::from_long(0, prec));
  BigFloat maxdiag = BigFloat::from_long(0, prec);
  for (long i = 0; i < N; ++i) {
    d[i] = G[i][i];
    if (maxdiag < d[i]) maxdiag = d[i];
  }
  BigFloat tol = BigFloat::mul_2si(maxdiag, -(long)(prec / 4));
  BigFloat min_pivot = BigFloat::from_long(0, prec);
  long rank = N;
  for (long j = 0; j < N; ++j) {
    long best = j;
    for (long i = j + 1; i < N; ++i)
      if (d[best] < d[i]) best = i;
    if (best != j) {
      std::swap(perm[best], perm[j]);
      std::swap(d[best], d[j]);
      std::swap(L[best], L[j]);
    }
    if (min_pivot > d[j]) min_pivot = BigFloat(d[j]);
    if (d[j].sign() < 0) {
      BigFloat neg = BigFloat::neg(d[j]);
      if (neg > tol)
        throw std::runtime_error(
            "integrate_sos_family: Gram matrix is indefinite beyond rounding "
            "(pivot " + std::string(d[j].to_hex()) + " against tolerance 2^-" +
            std::to_string(prec / 4) + " * max diagonal)");
    }
    if (d[j] <= tol) {  // remaining mass is at rounding level: rank found
      for (long i = j; i < N; ++i) {
        if (d[i].sign() < 0) {
          BigFloat neg = BigFloat::neg(d[i]);
          if (neg > tol)
            throw std::runtime_error(
                "integrate_sos_family: trailing diagonal entry below -tolerance");
        }
      }
      rank = j;
      break;
    }
    L[j][j] = BigFloat::sqrt(d[j], prec);
    for (long i = j + 1; i < N; ++i) {
      BigFloat s = G[perm[i]][perm[j]];
      for (long k = 0; k < j; ++k)
        s = BigFloat::sub(s, BigFloat::mul(L[i][k], L[j][k], prec), prec);
      L[i][j] = BigFloat::div(s, L[j][j], prec);
      d[i] = BigFloat::sub(d[i], BigFloat::mul(L[i][j], L[i][j], prec), prec);
    }
  }

  if (diag) {
    diag->basis_size = N;
    diag->rank = rank;
    diag->min_pivot = min_pivot;
    diag->max_pivot = maxdiag;
    diag->clamp_tol = tol;
  }

  std::vector<BigPoly2> squares;
  squares.reserve(rank);
  for (long j = 0; j < rank; ++j) {
    BigPoly2 s;
    s.precision_bits = prec;
    for (long i = j; i < N; ++i) {
      if (L[i][j].is_zero()) continue;
      s.add_to(basis[perm[i]].first, basis[perm[i]].second, L[i][j], prec);
    }
    squares.push_back(std::move(s));
  }
  return squares;
}

namespace {

// The R-side factors of the sliced integrand: with a = (x-y)/2,
//   C = 999/1000 a^2 + a^4,  D = 99/1000 lambda a^3,
//   C +- D = (a (a +- 99/2000 lambda))^2 + a^2 (999/1000 - (99/2000)^2 lambda^2),
// and the second weight stays positive on [0, 1].
struct RSideSquare {
  std::map<std::pair<int, int>, std::vector<mpq_class>> coeffs;  // lambda-polys
  std::vector<mpq_class> weight;
};

std::vector<RSideSquare> r_side_squares(bool plus_d) {
  mpq_class h(1, 2), q99(99, 4000);
  if (!plus_d) q99 = -q99;
  RSideSquare first;  // a^2 +- (99/2000) lambda a
  first.coeffs[{2, 0}] = {mpq_class(1, 4)};
  first.coeffs[{1, 1}] = {mpq_class(-1, 2)};
  first.coeffs[{0, 2}] = {mpq_class(1, 4)};
  first.coeffs[{1, 0}] = {0, q99};
  first.coeffs[{0, 1}] = {0, -q99};
  first.weight = {1};
  RSideSquare second;  // a, carrying the leftover positive lambda-weight
  second.coeffs[{1, 0}] = {h};
  second.coeffs[{0, 1}] = {-h};
  mpq_class c99(99, 2000);
  second.weight = {mpq_class(999, 1000), 0, -c99 * c99};
  return {std::move(first), std::move(second)};
}

}  // namespace

RCertResult build_R_certificate(const RationalPoly& P, mpfr_prec_t prec,
                                uint64_t seed) {
  RCertResult out;
  out.stage = "preconditions";
  long n = P.degree();
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("build_R_certificate: P must have even degree >= 2");
  mpq_class lc = P.lc();
  if (lc <= 0 || lc > 1)
    throw std::invalid_argument(
        "build_R_certificate: leading coefficient of P must lie in (0, 1]");

  RationalPoly U = antiderivative(P);
  RationalPoly Pd = derivative(P);
  RationalPoly f_plus = add(scale(P, 99), Pd);
  RationalPoly f_minus = sub(scale(P, 99), Pd);

  out.stage = "pair-roots(99P+P')";
  auto [qp1, qp2] = pair_roots_sos(f_plus, prec);
  out.stage = "pair-roots(99P-P')";
  auto [qm1, qm2] = pair_roots_sos(f_minus, prec);
  out.stage = "pair-roots(P)";
  auto [u1, u2] = pair_roots_sos(P, prec);

  out.stage = "lambda-family";
  // Each branch writes its integrand as (A C - B D) or (A C + B D) with
  //   A = P(z +- lambda a), B = P'(z +- lambda a)/99,
  // and composes halved cross products of the square lists:
  //   2(AC - BD) = (A-B)(C+D) + (A+B)(C-D),
  //   2(AC + BD) = (A-B)(C-D) + (A+B)(C+D).
  // A - B = (99P - P')(sub)/99 and A + B = (99P + P')(sub)/99, so every
  // q-side square carries alpha^2 = 1/(2 * 99).
  std::vector<LambdaSquare> family;
  BigFloat alpha2 = BigFloat::from_mpq(mpq_class(1, 198), prec, MPFR_RNDN);
  for (int branch = 0; branch < 2; ++branch) {
    bool toward_x = branch == 0;  // z + lambda a shifts toward x
    LPoly2 sm1 = affine_lambda_sub(qm1, toward_x, prec);
    LPoly2 sm2 = affine_lambda_sub(qm2, toward_x, prec);
    LPoly2 sp1 = affine_lambda_sub(qp1, toward_x, prec);
    LPoly2 sp2 = affine_lambda_sub(qp2, toward_x, prec);
    // branch toward x needs AC - BD: (A-B) squares meet C+D, (A+B) meet C-D;
    // the mirrored branch needs AC + BD: (A-B) with C-D, (A+B) with C+D.
    auto rplus = r_side_squares(true);
    auto rminus = r_side_squares(false);
    auto add_products = [&](const LPoly2& qside, const std::vector<RSideSquare>& rs) {
      for (const RSideSquare& r : rs) {
        LambdaSquare fam;
        fam.alpha2 = BigFloat(alpha2);
        fam.weight.reserve(r.weight.size());
        for (const mpq_class& w : r.weight)
          fam.weight.push_back(BigFloat::from_mpq(w, prec, MPFR_RNDN));
        fam.coeffs = lpoly2_mul(qside, lpoly2_from_rational(r.coeffs, prec), prec);
        family.push_back(std::move(fam));
      }
    };
    const auto& r_for_minus = toward_x ? rplus : rminus;  // meets (A-B)
    const auto& r_for_plus = toward_x ? rminus : rplus;   // meets (A+B)
    add_products(sm1, r_for_minus);
    add_products(sm2, r_for_minus);
    add_products(sp1, r_for_plus);
    add_products(sp2, r_for_plus);
  }

  out.stage = "gram-integration";
  std::vector<BigPoly2> squares = integrate_sos_family(family, prec, &out.gram);

  out.stage = "asymmetric-extra";
  // R differs from the symmetric form by + a^2/1000 * P(y); since P > 0 has
  // no real roots, P = u1^2 + u2^2 and the gap contributes two more squares
  // sqrt(1/1000) * a * u_i(y).
  {
    BigPoly2 a_half;
    a_half.precision_bits = prec;
    a_half.add_to(1, 0, BigFloat::from_mpq(mpq_class(1, 2), prec, MPFR_RNDN), prec);
    a_half.add_to(0, 1, BigFloat::from_mpq(mpq_class(-1, 2), prec, MPFR_RNDN), prec);
    BigFloat root_milli = BigFloat::sqrt(BigFloat::from_mpq(mpq_class(1, 1000), prec, MPFR_RNDN), prec);
    for (const BigPoly* u : {&u1, &u2}) {
      BigPoly2 uy;
      uy.precision_bits = prec;
      for (long t = 0; t <= u->degree(); ++t)
        if (!u->c[t].is_zero()) uy.add_to(0, (int)t, u->c[t], prec);
      squares.push_back(big2_scale(big2_mul(a_half, uy), root_milli));
    }
  }

  out.stage = "target";
  RationalPoly2 a_half_q;
  a_half_q.set(1, 0, mpq_class(1, 2));
  a_half_q.set(0, 1, mpq_class(-1, 2));
  RationalPoly2 asym = scale2(
      mul2(mul2(a_half_q, a_half_q), embed_affine(P, 0, 1, 0)), mpq_class(1, 1000));
  out.R = add2(build_r_direct(P, U), asym);

  out.stage = "residuals";
  auto pts = random_points(100, seed, prec);
  ResidualPair res = residuals_against(out.R, squares, pts, prec);

  out.stage = "bounds";
  SosCertificate& cert = out.cert;
  cert.squares = std::move(squares);
  cert.k_count = (long)cert.squares.size();
  cert.d_bound = n;
  cert.c_bound = BigFloat::from_long(0, prec);
  for (const BigPoly2& s : cert.squares)
    for (const auto& [k, v] : s.c) {
      if (v.is_zero()) continue;
      BigFloat need = BigFloat::mul(
          BigFloat::abs(v), factorial_big(k.first + k.second, prec, MPFR_RNDU), prec,
          MPFR_RNDU);
      if (cert.c_bound < need) cert.c_bound = need;
    }
  cert.max_coeff_residual = res.coeff;
  cert.max_point_residual = res.point;
  cert.points_tested = (long)pts.size();
  for (const BigPoly2& s : cert.squares) {
    BoundedCheck bc = check_bounded(s, cert.d_bound, cert.c_bound, prec);
    if (!bc.ok)
      throw std::runtime_error("build_R_certificate: square exceeds its own bound");
  }

  out.stage = "done";
  return out;
}

RCertResult build_R_certificate(const FlatApproxResult& result, mpfr_prec_t prec,
                                uint64_t seed) {
  RCertResult rc = build_R_certificate(result.p_hat, prec, seed);
  rc.cert.has_provenance = true;
  rc.cert.provenance = result.params;
  return rc;
}

CertReport verify_certificate(const RationalPoly2& R, const SosCertificate& cert,
                              long n_points, mpfr_prec_t prec, uint64_t seed) {
  CertReport rep;
  auto pts = random_points(n_points, seed, prec);
  ResidualPair res = residuals_against(R, cert.squares, pts, prec);
  rep.max_coeff_residual = res.coeff;
  rep.max_point_residual = res.point;
  rep.points_tested = n_points;
  rep.bounded_ok = true;
  for (const BigPoly2& s : cert.squares) {
    BoundedCheck bc = check_bounded(s, cert.d_bound, cert.c_bound, prec);
    if (!bc.ok) {
      rep.bounded_ok = false;
      std::ostringstream os;
      os << "square exceeds (d=" << cert.d_bound << ", C) bound at monomial x^"
         << bc.worst_dx << " y^" << bc.worst_dy;
      rep.note = os.str();
      break;
    }
  }
  BigFloat tol = BigFloat::mul_2si(BigFloat::from_long(1, 64), -64);
  rep.pass = rep.bounded_ok && rep.max_coeff_residual <= tol &&
             rep.max_point_residual <= tol;
  if (rep.pass && rep.note.empty()) rep.note = "residuals within 2^-64";
  if (!rep.pass && rep.note.empty()) rep.note = "residual above 2^-64";
  return rep;
}

std::string certificate_to_json(const RCertResult& rc) {
  json j;
  j["format"] = "flatexp-sos-certificate-v1";
  j["precision_bits"] = static_cast<long>(rc.cert.c_bound.prec());
  j["R"] = to_json(rc.R);
  json sq = json::array();
  for (const BigPoly2& s : rc.cert.squares) sq.push_back(to_json(s));
  j["squares"] = sq;
  j["k_count"] = rc.cert.k_count;
  j["d_bound"] = rc.cert.d_bound;
  j["c_bound"] = rc.cert.c_bound.to_hex();
  j["residuals"] = {
      {"max_coeff_residual", rc.cert.max_coeff_residual.to_hex()},
      {"max_point_residual", rc.cert.max_point_residual.to_hex()},
      {"points_tested", rc.cert.points_tested},
  };
  j["gram"] = {
      {"basis_size", rc.gram.basis_size},
      {"rank", rc.gram.rank},
  };
  j["stage"] = rc.stage;
  if (rc.cert.has_provenance) j["provenance"] = params_to_json(rc.cert.provenance);
  return j.dump(1);
}

RCertResult certificate_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != std::string("flatexp-sos-certificate-v1"))
    throw std::invalid_argument("certificate_from_json: unrecognized format tag");
  RCertResult rc;
  rc.R = rational_poly2_from_json(j.at("R"));
  for (const json& s : j.at("squares"))
    rc.cert.squares.push_back(big_poly2_from_json(s));
  rc.cert.k_count = j.at("k_count").get<long>();
  rc.cert.d_bound = j.at("d_bound").get<long>();
  mpfr_prec_t prec = j.value("precision_bits", 512L);
  rc.cert.c_bound = BigFloat::from_hex(j.at("c_bound").get<std::string>(), prec);
  const json& res = j.at("residuals");
  rc.cert.max_coeff_residual =
      BigFloat::from_hex(res.at("max_coeff_residual").get<std::string>(), prec);
  rc.cert.max_point_residual =
      BigFloat::from_hex(res.at("max_point_residual").get<std::string>(), prec);
  rc.cert.points_tested = res.at("points_tested").get<long>();
  if (j.contains("gram")) {
    rc.gram.basis_size = j["gram"].value("basis_size", 0L);
    rc.gram.rank = j["gram"].value("rank", 0L);
  }
  rc.stage = j.value("stage", "");
  if (j.contains("provenance")) {
    rc.cert.has_provenance = true;
    rc.cert.provenance = params_from_json(j["provenance"]);
  }
  return rc;
}

}  // namespace flatexp
