// Copyright 2026 The flatexp Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flat.hpp"
#include "gibbs.hpp"

#include <cmath>

using namespace flatexp;

namespace {

LocalTerm pauli_z(int qubit) {
  LocalTerm t;
  t.support = {qubit};
  t.matrix = DenseMatrix(2);
  t.matrix.at(0, 0) = cdd(1.0);
  t.matrix.at(1, 1) = cdd(-1.0);
  return t;
}

LocalTerm pauli_x(int qubit) {
  LocalTerm t;
  t.support = {qubit};
  t.matrix = DenseMatrix(2);
  t.matrix.at(0, 1) = cdd(1.0);
  t.matrix.at(1, 0) = cdd(1.0);
  return t;
}

constexpr double kTol40 = 9.094947017729282e-13;  // 2^-40

}  // namespace

TEST_CASE("assembling single-qubit terms") {
  // one Z on a single qubit
  DenseMatrix h1 = assemble_hamiltonian({{pauli_z(0), 1.0}}, 1);
  CHECK(h1.dim == 2);
  CHECK(h1.at(0, 0).re.to_double() == 1.0);
  CHECK(h1.at(1, 1).re.to_double() == -1.0);
  CHECK(h1.at(0, 1).abs2().to_double() == 0.0);

  // empty sum is the zero matrix
  DenseMatrix h0 = assemble_hamiltonian({}, 2);
  CHECK(h0.dim == 4);
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 4; ++j) CHECK(h0.at(i, j).abs2().to_double() == 0.0);

  // Z on each of two qubits: diag(2, 0, 0, -2)
  DenseMatrix h2 =
      assemble_hamiltonian({{pauli_z(0), 1.0}, {pauli_z(1), 1.0}}, 2);
  std::vector<double> want = {2, 0, 0, -2};
  for (long i = 0; i < 4; ++i) {
    CHECK(h2.at(i, i).re.to_double() == want[i]);
    for (long j = 0; j < 4; ++j)
      if (i != j) CHECK(h2.at(i, j).abs2().to_double() == 0.0);
  }
  CHECK(hermiticity_residual(h2).to_double() == 0.0);
}

TEST_CASE("local term validation") {
  CHECK_NOTHROW(validate_local_term(pauli_z(0), 3));
  CHECK_NOTHROW(validate_local_term(pauli_x(2), 3));

  // qubit index out of range
  CHECK_THROWS_AS(validate_local_term(pauli_z(3), 3), std::invalid_argument);

  // locality above the cap
  LocalTerm wide;
  wide.support = {0, 1, 2};
  wide.matrix = DenseMatrix(8);
  CHECK_THROWS_AS(validate_local_term(wide, 4), std::invalid_argument);

  // non-Hermitian
  LocalTerm skew;
  skew.support = {0};
  skew.matrix = DenseMatrix(2);
  skew.matrix.at(0, 1) = cdd(1.0);
  skew.matrix.at(1, 0) = cdd(0.5);
  CHECK_THROWS_AS(validate_local_term(skew, 2), std::invalid_argument);

  // operator norm above 1
  LocalTerm big;
  big.support = {0};
  big.matrix = DenseMatrix(2);
  big.matrix.at(0, 0) = cdd(1.5);
  big.matrix.at(1, 1) = cdd(-1.5);
  CHECK_THROWS_AS(validate_local_term(big, 2), std::invalid_argument);

  // shape mismatch between support and matrix dimension
  LocalTerm shape;
  shape.support = {0, 1};
  shape.matrix = DenseMatrix(2);
  CHECK_THROWS_AS(validate_local_term(shape, 3), std::invalid_argument);
}

TEST_CASE("dual graph of overlapping supports") {
  LocalTerm t01, t12, t3;
  t01.support = {0, 1};
  t12.support = {1, 2};
  t3.support = {3};
  for (LocalTerm* t : {&t01, &t12, &t3})
    t->matrix = DenseMatrix(1L << t->support.size());
  std::vector<std::pair<LocalTerm, double>> chain = {
      {t01, 1.0}, {t12, 1.0}, {t3, 1.0}};
  DualGraph g = dual_graph(chain);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == std::pair<int, int>(0, 1));
  CHECK(g.max_degree == 1);
  CHECK(g.degree[2] == 0);

  // all on the same qubit: complete graph on 3 vertices
  std::vector<std::pair<LocalTerm, double>> all = {
      {pauli_z(0), 0.5}, {pauli_x(0), 0.25}, {pauli_z(0), -0.5}};
  DualGraph k3 = dual_graph(all);
  CHECK(k3.edges.size() == 3);
  CHECK(k3.max_degree == 2);
}

TEST_CASE("Gibbs state of the zero Hamiltonian is maximally mixed") {
  DenseMatrix h0 = assemble_hamiltonian({}, 2);
  GibbsState g = gibbs_state(h0, 1.7);
  CHECK(std::abs(g.trace.to_double() - 1.0) <= kTol40);
  for (long i = 0; i < 4; ++i)
    CHECK(g.rho.at(i, i).re.to_double() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("Gibbs state of a single Z at beta = ln 3") {
  // H = Z at b = ln 3: diag(e^-b, e^b) / (e^-b + e^b) = diag(1/10, 9/10)
  DenseMatrix h = assemble_hamiltonian({{pauli_z(0), 1.0}}, 1);
  GibbsState g = gibbs_state(h, std::log(3.0));
  CHECK(g.rho.at(0, 0).re.to_double() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.rho.at(1, 1).re.to_double() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(std::abs(g.trace.to_double() - 1.0) <= kTol40);
  CHECK(g.min_weight.to_double() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("eigendecomposition carries a usable enclosure") {
  DenseMatrix h =
      assemble_hamiltonian({{pauli_x(0), 0.6}, {pauli_z(0), 0.8}}, 1);
  Spectrum sp = eigendecompose(h);
  REQUIRE(sp.eigs.size() == 2);
  // eigenvalues of 0.6 X + 0.8 Z are +-1
  CHECK(sp.eigs[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sp.eigs[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sp.enclosure_radius.to_double() >= 0.0);
  CHECK(sp.enclosure_radius.to_double() < 1e-10);
}

TEST_CASE("random ring instances are valid and well conditioned") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    ToyHamiltonian toy = random_ring_hamiltonian(3, seed);
    CHECK(toy.n_qubits == 3);
    CHECK(toy.terms.size() == 3);  // ring edges on 3 qubits
    double lam_sum = 0;
    for (auto& [term, lam] : toy.terms) {
      CHECK_NOTHROW(validate_local_term(term, 3));
      CHECK(std::abs(lam) <= 1.0);
      lam_sum += std::abs(lam);
    }
    DenseMatrix h = assemble_hamiltonian(toy.terms, toy.n_qubits);
    CHECK(hermiticity_residual(h).to_double() <= kTol40);
    GibbsState g = gibbs_state(h, 1.0);
    CHECK(std::abs(g.trace.to_double() - 1.0) <= kTol40);
    for (double w : g.weights) CHECK(w >= 0.0);
    // determinism: the same seed reproduces the same couplings
    ToyHamiltonian again = random_ring_hamiltonian(3, seed);
    for (size_t a = 0; a < toy.terms.size(); ++a)
      CHECK(again.terms[a].second == toy.terms[a].second);
    // spectrum bounded by the coupling weights
    CHECK(std::abs(g.spectrum.eigs.front()) <= lam_sum + 1e-9);
    CHECK(std::abs(g.spectrum.eigs.back()) <= lam_sum + 1e-9);
  }
}

TEST_CASE("spectral error of a realized approximation on a toy instance") {
  FlatParams params;
  params.beta = 1;
  params.delta = parse_delta("2^-6");
  params.ell = 8;
  params.s = 100;
  params.r = 36;
  params.k = 90;
  FlatApproxResult res = build_Phat(params);
  realize_P(res, 384);
  Interval kappa = params.kappa(384);

  ToyHamiltonian toy = random_ring_hamiltonian(3, 42);
  DenseMatrix h = assemble_hamiltonian(toy.terms, toy.n_qubits);
  SpectralReport rep = spectral_approx_error(res.p_realized, h, 1.0, kappa);
  REQUIRE(rep.eigs.size() == 8);
  CHECK(rep.rescale > 0.0);
  CHECK(rep.rescale <= 1.0);
  for (double x : rep.rescaled) {
    CHECK(x <= kappa.hi.to_double() + 1e-15);
    CHECK(x >= -kappa.hi.to_double() - 1e-15);
  }
  double eps_eff = params.eps(384).hi.to_double();
  CHECK(rep.max_error.to_double() <= eps_eff);
  for (double e : rep.errors) CHECK(e <= eps_eff);

  // H = 0 collapses every eigenvalue to zero, where the error is |P(0) - 1|
  DenseMatrix h0 = assemble_hamiltonian({}, 2);
  SpectralReport rep0 = spectral_approx_error(res.p_realized, h0, 1.0, kappa);
  BigFloat p0 = eval(res.p_realized, BigFloat::from_long(0, 384));
  double want = std::abs(p0.to_double() - 1.0);
  CHECK(rep0.max_error.to_double() >= want);
  CHECK(rep0.max_error.to_double() <= want + 1e-12);

  // a vanishingly small window just crushes the spectrum toward zero,
  // where the error approaches |P(0) - 1|
  Interval tiny = Interval::point(BigFloat::from_double(1e-300, 384));
  SpectralReport rep_tiny = spectral_approx_error(res.p_realized, h, 1.0, tiny);
  CHECK(rep_tiny.rescale <= 1e-290);
  CHECK(rep_tiny.max_error.to_double() ==
        doctest::Approx(want).epsilon(1e-6));

  CHECK_THROWS_AS(spectral_approx_error(res.p_realized, h, 0.0, kappa),
                  std::invalid_argument);
}
