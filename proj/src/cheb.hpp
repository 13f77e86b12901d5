// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Chebyshev polynomials of the first kind (integer coefficients, exact),
// plus the verification routines for their classical properties.

#pragma once

#include "poly.hpp"

#include <vector>

namespace flatexp {

// Memoized table T[0] = 1, T[1] = x, T[t+1] = 2x T[t] - T[t-1].
class ChebCache {
 public:
  // negative indices are folded: T[-t] = T[t]
  const RationalPoly& get(long t);
  size_t built() const { return table_.size(); }

 private:
  std::vector<RationalPoly> table_;
};

// max |coefficient| of T_t is at most (1 + sqrt 2)^t; compared against an
// outward interval enclosure, boundary counts as satisfied
bool check_coeff_bound(ChebCache& cache, long t, mpfr_prec_t prec = 192);

// even t has only even-degree terms, odd t only odd-degree terms
bool check_parity(ChebCache& cache, long t);

// |T_t'(x)| <= t^2 on the grid (within [-1,1]), interval-rigorous
bool check_markov(ChebCache& cache, long t, const std::vector<mpq_class>& grid,
                  mpfr_prec_t prec = 192);

}  // namespace flatexp
