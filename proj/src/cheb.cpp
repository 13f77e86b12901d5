// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#include "cheb.hpp"

#include <stdexcept>

namespace flatexp {

const RationalPoly& ChebCache::get(long t) {
  if (t < 0) t = -t;
  if (table_.empty()) {
    table_.push_back(RationalPoly::constant(1));
    table_.push_back(RationalPoly::x());
  }
  while (static_cast<long>(table_.size()) <= t) {
    size_t n = table_.size();
    RationalPoly next = sub(scale(mul(RationalPoly::x(), table_[n - 1]), mpq_class(2)),
                            table_[n - 2]);
    table_.push_back(std::move(next));
  }
  return table_[static_cast<size_t>(t)];
}

bool check_coeff_bound(ChebCache& cache, long t, mpfr_prec_t prec) {
  const RationalPoly& p = cache.get(t);
  for (int tries = 0; tries < 4; ++tries, prec *= 2) {
    // (1+sqrt2)^t as an outward enclosure
    Interval s2 = isqrt(Interval::from_long(2, prec), prec);
    Interval base = iadd(Interval::from_long(1, prec), s2, prec);
    Interval bound = Interval::from_long(1, prec);
    for (long i = 0; i < t; ++i) bound = imul(bound, base, prec);
    bool inconclusive = false;
    for (auto& q : p.c) {
      mpq_class a = ::abs(q);
      if (mpfr_cmp_q(bound.lo.raw(), a.get_mpq_t()) >= 0) continue;  // certainly within
      if (mpfr_cmp_q(bound.hi.raw(), a.get_mpq_t()) < 0) return false;  // certainly violated
      inconclusive = true;
      break;
    }
    if (!inconclusive) return true;
  }
  // never reached in practice: the bound is irrational and the enclosure
  // tightens geometrically
  return false;
}

bool check_parity(ChebCache& cache, long t) {
  const RationalPoly& p = cache.get(t);
  for (size_t j = 0; j < p.c.size(); ++j) {
    bool odd_term = (j % 2) == 1;
    bool odd_t = (t % 2) == 1;
    if (odd_term != odd_t && p.c[j] != 0) return false;
  }
  return true;
}

bool check_markov(ChebCache& cache, long t, const std::vector<mpq_class>& grid,
                  mpfr_prec_t prec) {
  RationalPoly d = derivative(cache.get(t));
  mpq_class t2(t);
  t2 *= t;
  for (auto& x : grid) {
    if (x < -1 || x > 1) throw std::invalid_argument("markov grid point outside [-1,1]");
    mpq_class v = ::abs(eval(d, x));  // exact rational evaluation
    if (v > t2) return false;
  }
  return true;
}

}  // namespace flatexp
