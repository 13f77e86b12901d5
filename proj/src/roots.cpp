// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#include "roots.hpp"

#include "interval.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flatexp {
namespace {

RationalPoly poly_rem(const RationalPoly& a, const RationalPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("remainder by the zero polynomial");
  const long db = b.degree();
  std::vector<mpq_class> c = a.c;
  long da = static_cast<long>(c.size()) - 1;
  while (da >= db) {
    mpq_class f = c[static_cast<size_t>(da)] / b.lc();
    for (long j = 0; j < db; ++j) c[static_cast<size_t>(da - db + j)] -= f * b.coeff(j);
    c[static_cast<size_t>(da)] = 0;  // leading term cancels exactly
    --da;
    while (da >= 0 && c[static_cast<size_t>(da)] == 0) --da;
  }
  c.resize(static_cast<size_t>(da + 1));
  return RationalPoly(std::move(c));
}

// Scale by a positive rational so the coefficients become coprime integers.
// Keeps every sign, which is all a Sturm sequence cares about, and stops the
// exponential coefficient blowup of a naive remainder sequence.
RationalPoly make_primitive(const RationalPoly& p) {
  if (p.is_zero()) return p;
  mpz_class den = 1;
  for (const auto& q : p.c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
  mpz_class g = 0;
  for (const auto& q : p.c) {
    mpz_class t = q.get_num() * (den / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.get_mpz_t());
  }
  if (g == 0) return p;
  std::vector<mpq_class> c;
  c.reserve(p.c.size());
  for (const auto& q : p.c) {
    mpq_class v = q * den / g;
    v.canonicalize();
    c.push_back(std::move(v));
  }
  return RationalPoly(std::move(c));
}

// Either polynomial view: exact rational or dyadic big-float coefficients.
struct CoeffView {
  const RationalPoly* rp = nullptr;
  const BigPoly* bp = nullptr;

  long degree() const { return rp ? rp->degree() : bp->degree(); }
  bool coeff_is_zero(long j) const {
    if (rp) return rp->coeff(j) == 0;
    return bp->c[static_cast<size_t>(j)].is_zero();
  }
  BigFloat coeff(long j, mpfr_prec_t w) const {
    BigFloat r(w);
    if (rp) mpfr_set_q(r.raw(), rp->coeff(j).get_mpq_t(), MPFR_RNDN);
    else mpfr_set(r.raw(), bp->c[static_cast<size_t>(j)].raw(), MPFR_RNDN);
    return r;
  }
  Interval coeff_iv(long j, mpfr_prec_t w) const {
    if (rp) return Interval::from_mpq(rp->coeff(j), w);
    BigFloat lo(w), hi(w);
    mpfr_set(lo.raw(), bp->c[static_cast<size_t>(j)].raw(), MPFR_RNDD);
    mpfr_set(hi.raw(), bp->c[static_cast<size_t>(j)].raw(), MPFR_RNDU);
    return Interval(std::move(lo), std::move(hi));
  }
};

double log2_mag(const CoeffView& cv, long j) {
  BigFloat c = cv.coeff(j, 64);
  if (c.is_zero()) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(c.exp2()) - 0.5;
}

// Initial guesses on circles whose radii come from the upper convex hull of
// (j, log2 |c_j|); the classical choice that starts every root near its
// eventual modulus.
std::vector<Cplx> polygon_guesses(const CoeffView& cv, long lo, long hi, mpfr_prec_t w) {
  struct Pt { long j; double e; };
  std::vector<Pt> pts;
  for (long j = lo; j <= hi; ++j)
    if (!cv.coeff_is_zero(j)) pts.push_back({j - lo, log2_mag(cv, j)});
  std::vector<Pt> hull;
  for (const Pt& p : pts) {
    while (hull.size() >= 2) {
      const Pt& a = hull[hull.size() - 2];
      const Pt& b = hull[hull.size() - 1];
      // keep only points strictly above the chord: upper hull
      if ((b.j - a.j) * (p.e - a.e) - (p.j - a.j) * (b.e - a.e) >= 0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  std::vector<Cplx> z;
  z.reserve(static_cast<size_t>(hi - lo));
  for (size_t seg = 0; seg + 1 < hull.size(); ++seg) {
    long m = hull[seg + 1].j - hull[seg].j;
    double l2r = (hull[seg].e - hull[seg + 1].e) / static_cast<double>(m);
    l2r = std::clamp(l2r, -480.0, 480.0);
    double rad = std::exp2(l2r);
    for (long q = 0; q < m; ++q) {
      double th = 2.0 * M_PI * (static_cast<double>(q) + 0.5) / static_cast<double>(m) +
                  0.4 + 0.9 * static_cast<double>(seg);
      z.push_back(Cplx::from_double(rad * std::cos(th), rad * std::sin(th), w));
    }
  }
  return z;
}

// One Aberth-Ehrlich stage at fixed precision. Returns true when every root
// reached a relative correction below 2^{-(w-8)}.
bool aberth_stage(const std::vector<BigFloat>& c, std::vector<Cplx>& z,
                  mpfr_prec_t w, int max_sweeps) {
  const long n = static_cast<long>(z.size());
  const long nc = static_cast<long>(c.size());
  std::vector<bool> done(n, false);
  std::vector<long> prev_rel(n, LONG_MAX);

  mpfr_t pr, pi, dr, di, t1, t2, t3, sr, si, ar, ai, den;
  mpfr_inits2(w, pr, pi, dr, di, t1, t2, t3, sr, si, ar, ai, den, (mpfr_ptr)0);
  auto cleanup = [&]() {
    mpfr_clears(pr, pi, dr, di, t1, t2, t3, sr, si, ar, ai, den, (mpfr_ptr)0);
  };

  bool all = false;
  for (int sweep = 0; sweep < max_sweeps && !all; ++sweep) {
    all = true;
    for (long i = 0; i < n; ++i) {
      if (done[i]) continue;
      mpfr_srcptr zr = z[i].re.raw(), zi = z[i].im.raw();

      // p and p' by one Horner pass (real coefficients, complex point)
      mpfr_set_ui(pr, 0, MPFR_RNDN); mpfr_set_ui(pi, 0, MPFR_RNDN);
      mpfr_set_ui(dr, 0, MPFR_RNDN); mpfr_set_ui(di, 0, MPFR_RNDN);
      for (long j = nc - 1; j >= 0; --j) {
        // d = d z + p
        mpfr_mul(t1, dr, zr, MPFR_RNDN); mpfr_mul(t2, di, zi, MPFR_RNDN);
        mpfr_sub(t3, t1, t2, MPFR_RNDN);
        mpfr_mul(t1, dr, zi, MPFR_RNDN); mpfr_mul(t2, di, zr, MPFR_RNDN);
        mpfr_add(di, t1, t2, MPFR_RNDN); mpfr_add(di, di, pi, MPFR_RNDN);
        mpfr_add(dr, t3, pr, MPFR_RNDN);
        // p = p z + c_j
        mpfr_mul(t1, pr, zr, MPFR_RNDN); mpfr_mul(t2, pi, zi, MPFR_RNDN);
        mpfr_sub(t3, t1, t2, MPFR_RNDN);
        mpfr_mul(t1, pr, zi, MPFR_RNDN); mpfr_mul(t2, pi, zr, MPFR_RNDN);
        mpfr_add(pi, t1, t2, MPFR_RNDN);
        mpfr_add(pr, t3, c[j].raw(), MPFR_RNDN);
      }
      if (mpfr_zero_p(pr) && mpfr_zero_p(pi)) { done[i] = true; continue; }

      // Newton step N = p/p'
      mpfr_mul(t1, dr, dr, MPFR_RNDN); mpfr_mul(t2, di, di, MPFR_RNDN);
      mpfr_add(den, t1, t2, MPFR_RNDN);
      if (mpfr_zero_p(den)) {
        // p' vanished: nudge the iterate and keep going
        mpfr_mul_2si(t1, zr, -static_cast<long>(w) / 3, MPFR_RNDN);
        mpfr_add(z[i].re.raw(), zr, t1, MPFR_RNDN);
        all = false;
        continue;
      }
      mpfr_mul(t1, pr, dr, MPFR_RNDN); mpfr_mul(t2, pi, di, MPFR_RNDN);
      mpfr_add(ar, t1, t2, MPFR_RNDN); mpfr_div(ar, ar, den, MPFR_RNDN);
      mpfr_mul(t1, pi, dr, MPFR_RNDN); mpfr_mul(t2, pr, di, MPFR_RNDN);
      mpfr_sub(ai, t1, t2, MPFR_RNDN); mpfr_div(ai, ai, den, MPFR_RNDN);

      // Aberth coupling S = sum 1/(z_i - z_j)
      mpfr_set_ui(sr, 0, MPFR_RNDN); mpfr_set_ui(si, 0, MPFR_RNDN);
      for (long j = 0; j < n; ++j) {
        if (j == i) continue;
        mpfr_sub(t1, zr, z[j].re.raw(), MPFR_RNDN);
        mpfr_sub(t2, zi, z[j].im.raw(), MPFR_RNDN);
        mpfr_mul(t3, t1, t1, MPFR_RNDN); mpfr_mul(den, t2, t2, MPFR_RNDN);
        mpfr_add(den, den, t3, MPFR_RNDN);
        if (mpfr_zero_p(den)) {
          mpfr_set_ui(t3, 1, MPFR_RNDN);
          mpfr_mul_2si(t3, t3, z[i].re.exp2() - static_cast<long>(w) / 2, MPFR_RNDN);
          mpfr_add(z[j].re.raw(), z[j].re.raw(), t3, MPFR_RNDN);
          mpfr_sub(t1, zr, z[j].re.raw(), MPFR_RNDN);
          mpfr_mul(t3, t1, t1, MPFR_RNDN); mpfr_mul(den, t2, t2, MPFR_RNDN);
          mpfr_add(den, den, t3, MPFR_RNDN);
        }
        mpfr_div(t1, t1, den, MPFR_RNDN);
        mpfr_div(t2, t2, den, MPFR_RNDN);
        mpfr_add(sr, sr, t1, MPFR_RNDN);
        mpfr_sub(si, si, t2, MPFR_RNDN);
      }

      // correction N / (1 - N S)
      mpfr_mul(t1, ar, sr, MPFR_RNDN); mpfr_mul(t2, ai, si, MPFR_RNDN);
      mpfr_sub(t3, t1, t2, MPFR_RNDN);
      mpfr_ui_sub(t3, 1, t3, MPFR_RNDN);  // real part of 1 - N S
      mpfr_mul(t1, ar, si, MPFR_RNDN); mpfr_mul(t2, ai, sr, MPFR_RNDN);
      mpfr_add(t1, t1, t2, MPFR_RNDN);
      mpfr_neg(t1, t1, MPFR_RNDN);        // imag part of 1 - N S
      mpfr_mul(t2, t3, t3, MPFR_RNDN); mpfr_mul(den, t1, t1, MPFR_RNDN);
      mpfr_add(den, den, t2, MPFR_RNDN);
      if (!mpfr_zero_p(den)) {
        mpfr_mul(sr, ar, t3, MPFR_RNDN); mpfr_mul(si, ai, t1, MPFR_RNDN);
        mpfr_add(sr, sr, si, MPFR_RNDN); mpfr_div(sr, sr, den, MPFR_RNDN);
        mpfr_mul(si, ai, t3, MPFR_RNDN); mpfr_mul(t2, ar, t1, MPFR_RNDN);
        mpfr_sub(si, si, t2, MPFR_RNDN); mpfr_div(si, si, den, MPFR_RNDN);
        mpfr_swap(ar, sr); mpfr_swap(ai, si);
      }
      mpfr_sub(z[i].re.raw(), zr, ar, MPFR_RNDN);
      mpfr_sub(z[i].im.raw(), zi, ai, MPFR_RNDN);

      long ec = std::max(mpfr_zero_p(ar) ? LONG_MIN : mpfr_get_exp(ar),
                         mpfr_zero_p(ai) ? LONG_MIN : mpfr_get_exp(ai));
      long ez = std::max(z[i].re.is_zero() ? LONG_MIN : z[i].re.exp2(),
                         z[i].im.is_zero() ? LONG_MIN : z[i].im.exp2());
      if (ec == LONG_MIN || ez == LONG_MIN) {
        done[i] = ec == LONG_MIN;
      } else {
        long rel = ec - ez;
        // finished at full working accuracy, or the correction has hit the
        // rounding floor of this precision and stopped shrinking
        done[i] = rel <= -(static_cast<long>(w) - 8) ||
                  (rel <= -(static_cast<long>(w) / 2) && rel >= prev_rel[i]);
        prev_rel[i] = rel;
      }
      if (!done[i]) all = false;
    }
  }
  cleanup();
  return all;
}

BigFloat mag_upper(const Interval& re, const Interval& im, mpfr_prec_t p) {
  BigFloat a = re.mag(), b = im.mag();
  BigFloat s = BigFloat::add(BigFloat::mul(a, a, p, MPFR_RNDU),
                             BigFloat::mul(b, b, p, MPFR_RNDU), p, MPFR_RNDU);
  return BigFloat::sqrt(s, p, MPFR_RNDU);
}

BigFloat axis_lower(const Interval& v, mpfr_prec_t p) {
  if (v.contains_zero()) return BigFloat::from_long(0, p);
  BigFloat a = BigFloat::abs(v.lo), b = BigFloat::abs(v.hi);
  return a < b ? a : b;
}

BigFloat mag_lower(const Interval& re, const Interval& im, mpfr_prec_t p) {
  BigFloat a = axis_lower(re, p), b = axis_lower(im, p);
  BigFloat s = BigFloat::add(BigFloat::mul(a, a, p, MPFR_RNDD),
                             BigFloat::mul(b, b, p, MPFR_RNDD), p, MPFR_RNDD);
  return BigFloat::sqrt(s, p, MPFR_RNDD);
}

RootSet find_roots_impl(const CoeffView& cv, mpfr_prec_t prec) {
  RootSet rs;
  rs.precision_bits = prec;
  rs.residual = BigFloat::from_long(0, 64);
  const long n = cv.degree();
  if (n < 0) {
    rs.converged = false;
    rs.note = "zero polynomial";
    return rs;
  }
  if (n == 0) {
    rs.converged = true;
    return rs;
  }

  long m0 = 0;
  while (m0 <= n && cv.coeff_is_zero(m0)) ++m0;
  const long nr = n - m0;

  std::vector<Cplx> z;
  bool conv = true;
  if (nr > 0) {
    z = polygon_guesses(cv, m0, n, 128);
    mpfr_prec_t w = 128;
    for (;;) {
      std::vector<BigFloat> c;
      c.reserve(static_cast<size_t>(nr) + 1);
      for (long j = m0; j <= n; ++j) c.push_back(cv.coeff(j, w));
      conv = aberth_stage(c, z, w, w == 128 ? 400 : 24);
      if (w >= prec) break;
      mpfr_prec_t nw = std::min<mpfr_prec_t>(w * 2, prec);
      for (auto& zz : z) {  // carry the iterates to the wider precision
        BigFloat re(nw), im(nw);
        mpfr_set(re.raw(), zz.re.raw(), MPFR_RNDN);
        mpfr_set(im.raw(), zz.im.raw(), MPFR_RNDN);
        zz.re = std::move(re);
        zz.im = std::move(im);
      }
      w = nw;
    }
  }
  rs.converged = conv;

  // exact zero roots first, with zero-width disks
  for (long i = 0; i < m0; ++i) {
    rs.roots.push_back(Cplx::from_double(0.0, 0.0, prec));
    rs.radii.push_back(BigFloat::from_long(0, 64));
  }

  // certified inclusion radii: the union of disks D(z_i, nr |W_i|) with
  // W_i = p(z_i) / (lc prod_{j != i} (z_i - z_j)) contains every root
  if (nr > 0) {
    std::vector<Interval> civ;
    civ.reserve(static_cast<size_t>(nr) + 1);
    for (long j = m0; j <= n; ++j) civ.push_back(cv.coeff_iv(j, prec));
    BigFloat worst_resid = BigFloat::from_long(0, 64);
    for (long i = 0; i < nr; ++i) {
      Interval zr = Interval::point(z[i].re), zi = Interval::point(z[i].im);
      // Horner for p(z_i)
      Interval pre = civ[static_cast<size_t>(nr)], pim = Interval::from_long(0, prec);
      // and for the scale sum |c_j| |z_i|^j
      Interval zmag = Interval::point(mag_upper(zr, zi, prec));
      Interval sc = iabs(civ[static_cast<size_t>(nr)]);
      for (long j = nr - 1; j >= 0; --j) {
        Interval t = isub(imul(pre, zr, prec), imul(pim, zi, prec), prec);
        pim = iadd(imul(pre, zi, prec), imul(pim, zr, prec), prec);
        pre = iadd(t, civ[static_cast<size_t>(j)], prec);
        sc = iadd(imul(sc, zmag, prec), iabs(civ[static_cast<size_t>(j)]), prec);
      }
      // product of differences times the leading coefficient
      Interval qre = civ[static_cast<size_t>(nr)], qim = Interval::from_long(0, prec);
      for (long j = 0; j < nr; ++j) {
        if (j == i) continue;
        Interval dre = isub(zr, Interval::point(z[j].re), prec);
        Interval dim = isub(zi, Interval::point(z[j].im), prec);
        Interval t = isub(imul(qre, dre, prec), imul(qim, dim, prec), prec);
        qim = iadd(imul(qre, dim, prec), imul(qim, dre, prec), prec);
        qre = t;
      }
      BigFloat num = mag_upper(pre, pim, prec);
      BigFloat den = mag_lower(qre, qim, prec);
      BigFloat rad(prec);
      if (den.is_zero()) mpfr_set_inf(rad.raw(), 1);
      else {
        rad = BigFloat::div(num, den, prec, MPFR_RNDU);
        rad = BigFloat::mul(rad, BigFloat::from_long(nr, prec), prec, MPFR_RNDU);
      }
      rs.roots.push_back(z[i]);
      rs.radii.push_back(rad);
      BigFloat slow = axis_lower(sc, prec);
      if (!slow.is_zero()) {
        BigFloat rr = BigFloat::div(num, slow, 64, MPFR_RNDU);
        if (rr > worst_resid) worst_resid = rr;
      }
    }
    rs.residual = worst_resid;
  }

  // conjugate pairing by nearest match in double precision
  {
    const size_t m = rs.roots.size();
    std::vector<bool> used(m, false);
    for (size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      double ri = rs.roots[i].re.to_double(), ii = rs.roots[i].im.to_double();
      if (!(ii > 0)) continue;
      size_t best = m;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < m; ++j) {
        if (used[j] || j == i) continue;
        double rj = rs.roots[j].re.to_double(), ij = rs.roots[j].im.to_double();
        if (!(ij < 0)) continue;
        double d2 = (ri - rj) * (ri - rj) + (ii + ij) * (ii + ij);
        if (d2 < bd) { bd = d2; best = j; }
      }
      if (best < m) {
        used[i] = used[best] = true;
        rs.pairing.emplace_back(static_cast<int>(i), static_cast<int>(best));
      }
    }
  }
  return rs;
}

}  // namespace

RootSet find_roots(const RationalPoly& p, mpfr_prec_t prec) {
  CoeffView cv;
  cv.rp = &p;
  return find_roots_impl(cv, prec);
}

RootSet find_roots(const BigPoly& p, mpfr_prec_t prec) {
  CoeffView cv;
  cv.bp = &p;
  return find_roots_impl(cv, prec);
}

mpq_class cauchy_root_bound(const RationalPoly& p) {
  if (p.degree() < 1) throw std::invalid_argument("cauchy_root_bound needs degree >= 1");
  mpq_class m = 0;
  for (long j = 0; j < p.degree(); ++j) {
    mpq_class a = abs(p.coeff(j));
    if (a > m) m = a;
  }
  return 1 + m / abs(p.lc());
}

std::vector<RationalPoly> sturm_chain(const RationalPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("sturm chain of the zero polynomial");
  std::vector<RationalPoly> ch;
  ch.push_back(make_primitive(p));
  if (p.degree() == 0) return ch;
  ch.push_back(make_primitive(derivative(p)));
  while (!ch.back().is_zero() && ch.back().degree() > 0) {
    RationalPoly r = poly_rem(ch[ch.size() - 2], ch.back());
    if (r.is_zero()) break;
    ch.push_back(make_primitive(scale(r, -1)));
  }
  return ch;
}

long sign_changes_at(const std::vector<RationalPoly>& chain, const mpq_class& x) {
  long changes = 0;
  int prev = 0;
  for (const auto& q : chain) {
    int s = sgn(eval(q, x));
    if (s != 0) {
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
  }
  return changes;
}

long count_real_roots(const RationalPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("root count of the zero polynomial");
  if (p.degree() < 1) return 0;
  mpq_class B = cauchy_root_bound(p);
  return count_real_roots(p, -B, B);
}

long count_real_roots(const RationalPoly& p, const mpq_class& a, const mpq_class& b) {
  if (p.is_zero()) throw std::invalid_argument("root count of the zero polynomial");
  if (p.degree() < 1) return 0;
  auto ch = sturm_chain(p);
  return sign_changes_at(ch, a) - sign_changes_at(ch, b);
}

std::vector<std::pair<mpq_class, mpq_class>> isolate_real_roots(
    const RationalPoly& p, const mpq_class& max_width) {
  if (p.is_zero()) throw std::invalid_argument("isolation of the zero polynomial");
  if (!(max_width > 0)) throw std::invalid_argument("max_width must be positive");
  std::vector<std::pair<mpq_class, mpq_class>> out;
  if (p.degree() < 1) return out;
  auto ch = sturm_chain(p);
  auto vc = [&](const mpq_class& x) { return sign_changes_at(ch, x); };

  struct Seg { mpq_class a, b; long c; };
  std::vector<Seg> work;
  mpq_class B = cauchy_root_bound(p);
  long total = vc(-B) - vc(B);
  if (total > 0) work.push_back({-B, B, total});
  while (!work.empty()) {
    Seg s = std::move(work.back());
    work.pop_back();
    if (s.c == 1 && s.b - s.a <= max_width) {
      out.emplace_back(s.a, s.b);
      continue;
    }
    mpq_class m = (s.a + s.b) / 2;
    while (eval(p, m) == 0) m += (s.b - m) / 16;  // split points must miss roots
    long cl = vc(s.a) - vc(m);
    long cr = s.c - cl;
    if (cl > 0) work.push_back({s.a, m, cl});
    if (cr > 0) work.push_back({m, s.b, cr});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

RealRootCert certify_no_real_roots(const RationalPoly& p, mpfr_prec_t prec,
                                   long sturm_degree_cap) {
  RealRootCert c;
  c.degree = p.degree();
  c.max_root_mag = BigFloat::from_long(0, 64);
  if (p.is_zero()) {
    c.note = "zero polynomial";
    return c;
  }
  if (p.degree() == 0) {
    c.no_real_roots = true;
    c.certified = true;
    c.min_im_over_radius = std::numeric_limits<double>::infinity();
    return c;
  }

  RootSet rs = find_roots(p, prec);
  bool excluded = rs.converged && rs.roots.size() == static_cast<size_t>(p.degree());
  double minratio = std::numeric_limits<double>::infinity();
  BigFloat maxmag = BigFloat::from_long(0, 192);
  for (size_t i = 0; i < rs.roots.size(); ++i) {
    BigFloat aim = BigFloat::abs(rs.roots[i].im);
    const BigFloat& rad = rs.radii[i];
    if (rad.is_nan() || mpfr_inf_p(rad.raw())) {
      excluded = false;
      minratio = 0;
      continue;
    }
    if (!(aim > rad)) excluded = false;
    double ratio;
    if (rad.is_zero())
      ratio = aim.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    else
      ratio = BigFloat::div(aim, rad, 64, MPFR_RNDD).to_double();
    minratio = std::min(minratio, ratio);
    BigFloat zr = BigFloat::abs(rs.roots[i].re);
    BigFloat m2 = BigFloat::add(BigFloat::mul(zr, zr, 192, MPFR_RNDU),
                                BigFloat::mul(aim, aim, 192, MPFR_RNDU), 192, MPFR_RNDU);
    BigFloat zm = BigFloat::add(BigFloat::sqrt(m2, 192, MPFR_RNDU), rad, 192, MPFR_RNDU);
    if (zm > maxmag) maxmag = zm;
  }
  c.min_im_over_radius = rs.roots.empty() ? 0.0 : minratio;
  c.max_root_mag = maxmag;

  if (excluded && !rs.roots.empty() && minratio > 1e6) {
    c.no_real_roots = true;
    c.certified = true;
    c.note = "every inclusion disk clears the real axis";
    return c;
  }
  if (p.degree() <= sturm_degree_cap) {
    long nreal = count_real_roots(p);
    c.used_sturm = true;
    c.no_real_roots = nreal == 0;
    c.certified = true;
    c.note = "exact real-root count = " + std::to_string(nreal);
    return c;
  }
  c.certified = false;
  c.note = "disk margin inconclusive and degree exceeds the exact-count cap";
  return c;
}

}  // namespace flatexp
