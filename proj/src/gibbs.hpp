// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale Gibbs-state demo: small local Hamiltonians, dense
// eigendecomposition with double-double residual enclosures, and the
// spectral approximation error of a constructed polynomial against exp(-x).

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dd.hpp"
#include "interval.hpp"
#include "poly.hpp"

namespace flatexp {

inline constexpr int kMaxQubits = 10;
inline constexpr int kLocalityCap = 2;

// Dense square complex matrix, row-major, double-double entries.
struct DenseMatrix {
  long dim = 0;
  std::vector<cdd> a;

  DenseMatrix() = default;
  explicit DenseMatrix(long d) : dim(d), a(static_cast<size_t>(d) * d) {}
  cdd& at(long i, long j) { return a[static_cast<size_t>(i) * dim + j]; }
  const cdd& at(long i, long j) const { return a[static_cast<size_t>(i) * dim + j]; }
};

// One local term: a Hermitian matrix on the qubits listed in support.
struct LocalTerm {
  std::vector<int> support;  // sorted, distinct qubit indices
  DenseMatrix matrix;        // dimension 2^|support|, operator norm <= 1
};

struct ToyHamiltonian {
  int n_qubits = 0;
  std::vector<std::pair<LocalTerm, double>> terms;  // (E_a, lambda_a)
  int dual_graph_degree = 0;
};

// Throws std::invalid_argument when the support or matrix shape is off,
// Hermiticity fails beyond 2^-40, or the operator norm exceeds 1 + 2^-40
// (norm checked via the Frobenius upper bound, then a Gershgorin fallback).
void validate_local_term(const LocalTerm& term, int n, int locality_cap = kLocalityCap);

// Sum of lambda_a * (E_a embedded on its support). Exact Kronecker index
// arithmetic; entries accumulate in double-double.
DenseMatrix assemble_hamiltonian(const std::vector<std::pair<LocalTerm, double>>& terms,
                                 int n);

// max_ij |H_ij - conj(H_ji)|, for the Hermiticity postcondition.
dd hermiticity_residual(const DenseMatrix& h);

// Frobenius norm (upper bounds the operator norm).
dd frobenius_norm(const DenseMatrix& h);

struct DualGraph {
  std::vector<std::pair<int, int>> edges;  // term indices, a < b
  std::vector<int> degree;
  int max_degree = 0;
};

// Edge between terms a != b iff their supports intersect.
DualGraph dual_graph(const std::vector<std::pair<LocalTerm, double>>& terms);

// Eigendecomposition with an a-posteriori enclosure: every eigenvalue of the
// exact input lies within enclosure_radius of some entry of eigs.
struct Spectrum {
  long dim = 0;
  std::vector<double> eigs;  // ascending
  std::vector<cdd> v;        // eigenvector columns, row-major dim x dim
  dd enclosure_radius;
};

Spectrum eigendecompose(const DenseMatrix& h);

struct GibbsState {
  DenseMatrix rho;
  dd trace;                 // of the assembled rho
  dd min_weight;            // smallest Boltzmann weight (eigenvalue of rho up
                            // to the assembly residual)
  std::vector<double> weights;
  Spectrum spectrum;        // of the input H
};

// rho = exp(-beta H) / tr(exp(-beta H)) via eigendecomposition. Weights are
// formed in double-double relative to the smallest eigenvalue, so the trace
// normalization is exact up to dd rounding.
GibbsState gibbs_state(const DenseMatrix& h, double beta);

struct SpectralReport {
  BigFloat max_error;            // rigorous upper bound over all eigenvalues
  std::vector<double> eigs;      // raw eigenvalues of H
  std::vector<double> rescaled;  // after the affine rescale (midpoints)
  std::vector<double> errors;    // per-eigenvalue upper bounds
  double rescale = 1.0;          // factor applied to beta*H
  double enclosure_radius = 0.0;
  long precision_bits = 0;
};

// Rescales beta*H by kappa_lo / upper(||beta H||) so the spectrum provably
// lands inside [-kappa, kappa], then bounds |P(x_i) - e^{-x_i}| over the
// eigenvalue enclosures with interval arithmetic. Throws std::domain_error
// naming the offending eigenvalue if an enclosure still escapes the window.
SpectralReport spectral_approx_error(const BigPoly& P, const DenseMatrix& h,
                                     double beta, const Interval& kappa);

// Seeded 2-local ring instance: one random Pauli-basis Hermitian term per
// ring edge, operator norm <= 1 by construction, lambda_a uniform in [-1,1].
ToyHamiltonian random_ring_hamiltonian(int n, uint64_t seed);

}  // namespace flatexp
