// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#include "gibbs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace flatexp {

namespace {

constexpr double kTol40 = 9.094947017729282e-13;  // 2^-40

// Upper bound on a dd value as a plain double.
double dd_upper(const dd& x) {
  double v = x.hi + x.lo;
  v = std::nextafter(v, std::numeric_limits<double>::infinity());
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

bool support_ok(const std::vector<int>& s, int n) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] >= n) return false;
    if (i > 0 && s[i] <= s[i - 1]) return false;
  }
  return true;
}

double uniform_pm1(std::mt19937_64& rng) {
  double u = static_cast<double>(rng() >> 11) / 9007199254740992.0;  // [0,1)
  return 2.0 * u - 1.0;
}

}  // namespace

void validate_local_term(const LocalTerm& term, int n, int locality_cap) {
  if (!support_ok(term.support, n))
    throw std::invalid_argument("local term: support must be sorted, distinct, within [0,n)");
  if (static_cast<int>(term.support.size()) > locality_cap)
    throw std::invalid_argument("local term: support larger than the locality cap");
  long want = 1L << term.support.size();
  if (term.matrix.dim != want)
    throw std::invalid_argument("local term: matrix dimension must be 2^|support|");
  dd herm = hermiticity_residual(term.matrix);
  if (dd_upper(herm) > kTol40)
    throw std::invalid_argument("local term: matrix is not Hermitian within 2^-40");
  dd frob = frobenius_norm(term.matrix);
  if (dd_upper(frob) > 1.0 + kTol40) {
    // Frobenius overshoots the operator norm by up to sqrt(dim); fall back to
    // the eigenvalue range before rejecting.
    Spectrum s = eigendecompose(term.matrix);
    double worst = 0.0;
    for (double e : s.eigs) worst = std::max(worst, std::abs(e));
    worst += dd_upper(s.enclosure_radius);
    if (worst > 1.0 + kTol40)
      throw std::invalid_argument("local term: operator norm exceeds 1");
  }
}

DenseMatrix assemble_hamiltonian(const std::vector<std::pair<LocalTerm, double>>& terms,
                                 int n) {
  if (n < 1 || n > kMaxQubits) {
    std::ostringstream os;
    os << "assemble_hamiltonian: n = " << n << " outside [1, " << kMaxQubits
       << "] (dimension overflow)";
    throw std::invalid_argument(os.str());
  }
  long dim = 1L << n;
  DenseMatrix h(dim);
  for (const auto& [term, lambda] : terms) {
    validate_local_term(term, n);
    if (!(lambda >= -1.0 && lambda <= 1.0))
      throw std::invalid_argument("assemble_hamiltonian: coefficient outside [-1,1]");
    int k = static_cast<int>(term.support.size());
    long sub_dim = 1L << k;
    // Every global index splits into bits on the support and bits elsewhere.
    long rest_dim = dim >> k;
    std::vector<long> rest_bits;  // global positions of non-support qubits
    {
      std::vector<bool> in_sup(n, false);
      for (int q : term.support) in_sup[q] = true;
      for (int q = 0; q < n; ++q)
        if (!in_sup[q]) rest_bits.push_back(q);
    }
    auto compose = [&](long sub, long rest) {
      long idx = 0;
      for (int b = 0; b < k; ++b)
        if (sub >> b & 1) idx |= 1L << term.support[b];
      for (size_t b = 0; b < rest_bits.size(); ++b)
        if (rest >> b & 1) idx |= 1L << rest_bits[b];
      return idx;
    };
    dd lam(lambda);
    for (long rest = 0; rest < rest_dim; ++rest)
      for (long sr = 0; sr < sub_dim; ++sr)
        for (long sc = 0; sc < sub_dim; ++sc) {
          const cdd& e = term.matrix.at(sr, sc);
          cdd add(lam * e.re, lam * e.im);
          cdd& slot = h.at(compose(sr, rest), compose(sc, rest));
          slot = slot + add;
        }
  }
  return h;
}

dd hermiticity_residual(const DenseMatrix& h) {
  dd worst(0.0);
  for (long i = 0; i < h.dim; ++i)
    for (long j = i; j < h.dim; ++j) {
      cdd d = h.at(i, j) - h.at(j, i).conj();
      dd m = dd_sqrt(d.abs2());
      if (m > worst) worst = m;
    }
  return worst;
}

dd frobenius_norm(const DenseMatrix& h) {
  dd s(0.0);
  for (const cdd& e : h.a) s = s + e.abs2();
  return dd_sqrt(s);
}

DualGraph dual_graph(const std::vector<std::pair<LocalTerm, double>>& terms) {
  DualGraph g;
  int m = static_cast<int>(terms.size());
  g.degree.assign(m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const auto& sa = terms[a].first.support;
      const auto& sb = terms[b].first.support;
      bool meet = false;
      for (int q : sa)
        if (std::find(sb.begin(), sb.end(), q) != sb.end()) { meet = true; break; }
      if (meet) {
        g.edges.emplace_back(a, b);
        ++g.degree[a];
        ++g.degree[b];
      }
    }
  for (int d : g.degree) g.max_degree = std::max(g.max_degree, d);
  return g;
}

Spectrum eigendecompose(const DenseMatrix& h) {
  long dim = h.dim;
  Eigen::MatrixXcd hd(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j)
      hd(i, j) = std::complex<double>(h.at(i, j).re.to_double(),
                                      h.at(i, j).im.to_double());
  // Symmetrize the rounded copy so the solver sees an exactly Hermitian
  // matrix; the difference lands in the residual below.
  hd = (hd + hd.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hd);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");

  Spectrum out;
  out.dim = dim;
  out.eigs.resize(dim);
  for (long i = 0; i < dim; ++i) out.eigs[i] = solver.eigenvalues()(i);
  out.v.resize(static_cast<size_t>(dim) * dim);
  for (long i = 0; i < dim; ++i)
    for (long k = 0; k < dim; ++k) {
      std::complex<double> z = solver.eigenvectors()(i, k);
      out.v[static_cast<size_t>(i) * dim + k] = cdd(z.real(), z.imag());
    }

  // Residual R = H V - V Lambda and orthogonality defect V*V - I, both in
  // double-double against the exact input H. Every eigenvalue of H then lies
  // within ||R||_F / sigma_min(V) of a computed one (Bauer-Fike, Hermitian
  // case), with sigma_min(V)^2 >= 1 - ||V*V - I||_F.
  dd r_frob2(0.0);
  for (long kcol = 0; kcol < dim; ++kcol) {
    dd lam(out.eigs[kcol]);
    for (long i = 0; i < dim; ++i) {
      cdd acc(0.0, 0.0);
      for (long j = 0; j < dim; ++j)
        acc = acc + h.at(i, j) * out.v[static_cast<size_t>(j) * dim + kcol];
      const cdd& vik = out.v[static_cast<size_t>(i) * dim + kcol];
      cdd resid = acc - cdd(lam * vik.re, lam * vik.im);
      r_frob2 = r_frob2 + resid.abs2();
    }
  }
  dd eta2(0.0);
  for (long p = 0; p < dim; ++p)
    for (long q = 0; q < dim; ++q) {
      cdd acc(0.0, 0.0);
      for (long i = 0; i < dim; ++i)
        acc = acc + out.v[static_cast<size_t>(i) * dim + p].conj() *
                        out.v[static_cast<size_t>(i) * dim + q];
      if (p == q) acc = acc - cdd(1.0, 0.0);
      eta2 = eta2 + acc.abs2();
    }
  dd eta = dd_sqrt(eta2);
  dd denom2 = dd(1.0) - eta;
  if (!(denom2.hi > 0.0)) {
    out.enclosure_radius = frobenius_norm(h);  // degenerate V: trivial bound
  } else {
    dd radius = dd_sqrt(r_frob2) / dd_sqrt(denom2);
    // inflate slightly to absorb double-double rounding in the sums above
    out.enclosure_radius = radius * dd(1.0 + 1e-18) + dd(1e-290);
  }
  return out;
}

GibbsState gibbs_state(const DenseMatrix& h, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("gibbs_state: beta must be > 0");
  GibbsState out;
  out.spectrum = eigendecompose(h);
  long dim = out.spectrum.dim;
  double lam_min = out.spectrum.eigs.empty() ? 0.0 : out.spectrum.eigs[0];

  std::vector<dd> w(dim);
  dd z(0.0);
  for (long i = 0; i < dim; ++i) {
    w[i] = dd_exp(dd(-beta) * (dd(out.spectrum.eigs[i]) - dd(lam_min)));
    z = z + w[i];
  }
  out.weights.resize(dim);
  out.min_weight = dd(1.0);
  for (long i = 0; i < dim; ++i) {
    w[i] = w[i] / z;
    out.weights[i] = w[i].to_double();
    if (w[i] < out.min_weight) out.min_weight = w[i];
  }

  out.rho = DenseMatrix(dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) {
      cdd acc(0.0, 0.0);
      for (long k = 0; k < dim; ++k) {
        cdd vik = out.spectrum.v[static_cast<size_t>(i) * dim + k];
        cdd vjk = out.spectrum.v[static_cast<size_t>(j) * dim + k].conj();
        cdd prod = vik * vjk;
        acc = acc + cdd(w[k] * prod.re, w[k] * prod.im);
      }
      out.rho.at(i, j) = acc;
    }
  out.trace = dd(0.0);
  for (long i = 0; i < dim; ++i) out.trace = out.trace + out.rho.at(i, i).re;
  return out;
}

SpectralReport spectral_approx_error(const BigPoly& P, const DenseMatrix& h,
                                     double beta, const Interval& kappa) {
  if (!(beta > 0.0))
    throw std::invalid_argument("spectral_approx_error: beta must be > 0");
  Spectrum spec = eigendecompose(h);
  mpfr_prec_t prec = std::max<mpfr_prec_t>(256, P.precision_bits);

  SpectralReport rep;
  rep.eigs = spec.eigs;
  rep.enclosure_radius = dd_upper(spec.enclosure_radius);
  rep.precision_bits = prec;

  double rad = rep.enclosure_radius;
  double top = 0.0;
  for (double e : spec.eigs) top = std::max(top, std::abs(e));

  // rescale factor: kappa_lo / upper(beta (max|eig| + radius)), rounded down
  BigFloat c;
  if (top + rad == 0.0) {
    c = BigFloat::from_long(1, prec);
  } else {
    BigFloat bound = BigFloat::mul(
        BigFloat::from_double(beta, prec),
        BigFloat::add(BigFloat::from_double(top, prec),
                      BigFloat::from_double(rad, prec), prec, MPFR_RNDU),
        prec, MPFR_RNDU);
    c = BigFloat::div(kappa.lo, bound, prec, MPFR_RNDD);
    if (BigFloat::from_long(1, prec) < c) c = BigFloat::from_long(1, prec);
  }
  rep.rescale = c.to_double();

  IntervalPoly ip = to_interval(P, prec);
  BigFloat bthf = BigFloat::from_double(beta, prec);
  rep.max_error = BigFloat::from_long(0, prec);
  BigFloat radf = BigFloat::from_double(rad, prec);
  for (size_t i = 0; i < spec.eigs.size(); ++i) {
    BigFloat lam = BigFloat::from_double(spec.eigs[i], prec);
    Interval lam_enc(BigFloat::sub(lam, radf, prec, MPFR_RNDD),
                     BigFloat::add(lam, radf, prec, MPFR_RNDU));
    Interval x = imul(imul(Interval::point(c), Interval::point(bthf), prec),
                      lam_enc, prec);
    BigFloat neg_klo = BigFloat::neg(kappa.lo);
    if (x.lo < neg_klo || kappa.lo < x.hi) {
      std::ostringstream os;
      os << "spectral_approx_error: rescaled eigenvalue " << i << " ("
         << spec.eigs[i] << " -> [" << x.lo.to_double() << ", "
         << x.hi.to_double() << "]) escapes [-kappa, kappa]";
      throw std::domain_error(os.str());
    }
    rep.rescaled.push_back(BigFloat::mul(BigFloat::mul(c, bthf, prec), lam, prec)
                               .to_double());
    Interval pv = eval(ip, x);
    Interval ev = iexp(ineg(x), prec);
    Interval diff = isub(pv, ev, prec);
    BigFloat err = BigFloat::abs(diff.lo);
    BigFloat hi_abs = BigFloat::abs(diff.hi);
    if (err < hi_abs) err = hi_abs;
    rep.errors.push_back(err.to_double());
    if (rep.max_error < err) rep.max_error = err;
  }
  return rep;
}

ToyHamiltonian random_ring_hamiltonian(int n, uint64_t seed) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("random_ring_hamiltonian: n outside [1,10]");
  std::mt19937_64 rng(seed);

  // 2x2 Pauli basis
  auto pauli = [](int p) {
    DenseMatrix m(2);
    switch (p) {
      case 0: m.at(0, 0) = cdd(1.0); m.at(1, 1) = cdd(1.0); break;             // I
      case 1: m.at(0, 1) = cdd(1.0); m.at(1, 0) = cdd(1.0); break;             // X
      case 2: m.at(0, 1) = cdd(0.0, -1.0); m.at(1, 0) = cdd(0.0, 1.0); break;  // Y
      default: m.at(0, 0) = cdd(1.0); m.at(1, 1) = cdd(-1.0); break;           // Z
    }
    return m;
  };

  auto random_term = [&](const std::vector<int>& support) {
    int k = static_cast<int>(support.size());
    long dim = 1L << k;
    int basis = k == 1 ? 4 : 16;
    std::vector<double> coef(basis);
    dd sum_abs(0.0);
    for (int b = 0; b < basis; ++b) {
      coef[b] = uniform_pm1(rng);
      sum_abs = sum_abs + dd(std::abs(coef[b]));
    }
    if (sum_abs.hi <= 0.0) { coef[0] = 1.0; sum_abs = dd(1.0); }
    DenseMatrix m(dim);
    for (int b = 0; b < basis; ++b) {
      DenseMatrix p1 = pauli(k == 1 ? b : b / 4);
      for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) {
          cdd entry = k == 1 ? p1.at(i, j)
                             : p1.at(i >> 1, j >> 1) * pauli(b % 4).at(i & 1, j & 1);
          dd cb(coef[b]);
          cdd scaled(cb * entry.re / sum_abs, cb * entry.im / sum_abs);
          m.at(i, j) = m.at(i, j) + scaled;
        }
    }
    LocalTerm t;
    t.support = support;
    t.matrix = std::move(m);
    return t;
  };

  ToyHamiltonian ham;
  ham.n_qubits = n;
  if (n == 1) {
    ham.terms.emplace_back(random_term({0}), uniform_pm1(rng));
  } else {
    int n_edges = n == 2 ? 1 : n;
    for (int i = 0; i < n_edges; ++i) {
      int a = i, b = (i + 1) % n;
      std::vector<int> sup = {std::min(a, b), std::max(a, b)};
      LocalTerm t = random_term(sup);
      double lam = uniform_pm1(rng);
      ham.terms.emplace_back(std::move(t), lam);
    }
  }
  for (auto& [t, lam] : ham.terms) validate_local_term(t, n);
  ham.dual_graph_degree = dual_graph(ham.terms).max_degree;
  return ham;
}

}  // namespace flatexp
