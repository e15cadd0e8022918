// Copyright 2026 The chaoslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/quantum_core.hpp"

namespace chaoslab {
namespace {

KetState fock(const FockTruncation& tr, int s, int n) { return KetState::basis(tr.dim(), tr.index(s, n)); }

TEST(FockTruncation, FlatIndexConvention) {
  const FockTruncation tr(10);
  EXPECT_EQ(tr.cavity_dim(), 11);
  EXPECT_EQ(tr.dim(), 22);
  EXPECT_EQ(tr.index(0, 0), 0);
  EXPECT_EQ(tr.index(0, 10), 10);
  EXPECT_EQ(tr.index(1, 0), 11);
  EXPECT_EQ(tr.index(1, 3), 14);
  EXPECT_THROW(FockTruncation(0), InvalidArgument);
}

TEST(Operators, LadderLowersOnePhoton) {
  const FockTruncation tr(6);
  const auto ops = build_operators(tr);
  ComplexVector one = ComplexVector::Zero(7);
  one(1) = 1.0;
  const ComplexVector out = ops.a.apply(one);
  EXPECT_NEAR(std::abs(out(0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(out.tail(6).norm(), 0.0, 1e-15);
}

TEST(Operators, CanonicalCommutatorAwayFromEdge) {
  const FockTruncation tr(12);
  const auto ops = build_operators(tr);
  const ComplexMatrix c = commutator(ops.a, ops.a_dag).dense();
  for (int n = 0; n < 12; ++n)
    for (int m = 0; m < 12; ++m) EXPECT_NEAR(std::abs(c(n, m) - (n == m ? 1.0 : 0.0)), 0.0, 1e-13);
  // the hard truncation leaves -n_max at the edge
  EXPECT_NEAR(c(12, 12).real(), -12.0, 1e-12);
}

TEST(Operators, PauliAnticommutatorIsIdentity) {
  const FockTruncation tr(2);
  const auto ops = build_operators(tr);
  const ComplexMatrix m = (ops.sigma_plus * ops.sigma_minus + ops.sigma_minus * ops.sigma_plus).dense();
  EXPECT_NEAR((m - Eigen::Matrix2cd::Identity()).norm(), 0.0, 1e-15);
}

TEST(Operators, TensorEmbeddings) {
  const FockTruncation tr(5);
  const auto ops = build_operators(tr);
  const ComplexMatrix id = tensor(ops.qubit_identity, ops.cavity_identity).dense();
  EXPECT_NEAR((id - ComplexMatrix::Identity(tr.dim(), tr.dim())).norm(), 0.0, 1e-15);

  const ComplexVector g0 = fock(tr, 0, 0).amplitudes();
  EXPECT_NEAR((tensor(ops.sigma_z, ops.cavity_identity).apply(g0) + g0).norm(), 0.0, 1e-15);

  const ComplexVector e3 = fock(tr, 1, 3).amplitudes();
  EXPECT_NEAR((tensor(ops.qubit_identity, ops.number).apply(e3) - 3.0 * e3).norm(), 0.0, 1e-14);
  EXPECT_THROW(tensor(ops.a, ops.a), InvalidArgument);
}

TEST(Operators, HermiticityIsChecked) {
  const FockTruncation tr(4);
  const auto ops = build_operators(tr);
  EXPECT_NO_THROW(OperatorMatrix::hermitian((ops.A + ops.A_dag).sparse()));
  EXPECT_THROW(OperatorMatrix::hermitian(ops.A.sparse()), InvalidArgument);
}

TEST(States, KetNormIsValidated) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = 2.0;
  EXPECT_THROW(KetState{v}, InvalidArgument);
  EXPECT_NEAR(KetState::normalized(v).norm(), 1.0, 1e-15);
  EXPECT_THROW(KetState::normalized(ComplexVector::Zero(4)), InvalidArgument);
}

TEST(States, PartialTraceOfSeparableState) {
  const FockTruncation tr(3);
  const auto rho = DensityMatrix::from_ket(fock(tr, 0, 0));
  const auto q = partial_trace_cavity(rho, tr);
  EXPECT_NEAR(std::abs(q.matrix()(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(q.matrix().cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(States, PartialTraceOfBellState) {
  const FockTruncation tr(3);
  ComplexVector v = fock(tr, 0, 0).amplitudes() + fock(tr, 1, 1).amplitudes();
  const KetState psi = KetState::normalized(v);
  for (const auto& q : {partial_trace_cavity(DensityMatrix::from_ket(psi), tr), reduced_qubit(psi, tr)}) {
    EXPECT_NEAR(q.matrix()(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(q.matrix()(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(q.matrix()(0, 1)), 0.0, 1e-15);
  }
  const auto cav = reduced_cavity(psi, tr);
  EXPECT_NEAR(std::abs(cav.trace() - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(cav.purity(), 0.5, 1e-15);
}

TEST(States, PartialTraceKeepsUnitTrace) {
  const FockTruncation tr(16);
  const KetState a = product_state({0.3, -0.2}, {0.7, 0.4}, tr);
  const KetState b = product_state({-1.1, 0.5}, {-0.2, 0.9}, tr);
  const auto rho = DensityMatrix::mix(0.3, DensityMatrix::from_ket(a), DensityMatrix::from_ket(b));
  EXPECT_NEAR(std::abs(partial_trace_cavity(rho, tr).trace() - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(partial_trace_qubit(rho, tr).trace() - 1.0), 0.0, 1e-12);
}

TEST(States, DensityMatrixValidation) {
  Eigen::Matrix2cd bad;
  bad << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(DensityMatrix{ComplexMatrix(bad)}, InvalidArgument);
}

TEST(CoherentStates, VacuumAndMeanPhotonNumber) {
  const FockTruncation tr(40);
  const KetState vac = glauber_state({0.0, 0.0}, FockTruncation(40));
  EXPECT_NEAR(std::abs(vac.amplitudes()(0) - 1.0), 0.0, 1e-15);

  const KetState one = product_state({0.0, 0.0}, {1.0, 0.0}, tr);
  const auto ops = build_operators(tr);
  EXPECT_NEAR(expectation(ops.N, one).real(), 1.0, 1e-6);
}

TEST(CoherentStates, CaptionAmplitude) {
  const FockTruncation tr(200);
  const KetState c1 = product_state({0.825, 0.0}, {0.0, 5.4461}, tr);
  EXPECT_NEAR(c1.norm(), 1.0, 1e-12);
  const auto ops = build_operators(tr);
  const Complex a = expectation(ops.A, c1);
  EXPECT_NEAR(a.real(), 0.0, 1e-6);
  EXPECT_NEAR(a.imag(), 5.4461, 1e-6);
}

TEST(CoherentStates, TailMassPrecondition) {
  EXPECT_THROW(glauber_state({0.0, 5.45}, FockTruncation(40)), PreconditionError);
  EXPECT_GT(coherent_tail_mass({0.0, 5.45}, 40), 1e-8);
  EXPECT_LT(coherent_tail_mass({0.0, 5.45}, 100), 1e-12);
}

TEST(BlochStates, GroundPlusAndPopulation) {
  const FockTruncation tr(1);
  const auto ops = build_operators(tr);
  const KetState g = bloch_state({0.0, 0.0});
  EXPECT_NEAR(std::abs(g.amplitudes()(0) - 1.0), 0.0, 1e-15);

  const KetState plus = bloch_state({1.0, 0.0});
  const OperatorMatrix sx = ops.sigma_x;
  EXPECT_NEAR(expectation(sx, plus).real(), 1.0, 1e-15);

  // <sz> = (|tau|^2 - 1) / (|tau|^2 + 1)
  const KetState seven = bloch_state({7.0, 0.0});
  EXPECT_NEAR(expectation(ops.sigma_z, seven).real(), 0.96, 1e-15);
}

TEST(ProductStates, OtocInitialState) {
  const FockTruncation tr(5);
  const KetState phi = product_state({1.0, 0.0}, {0.0, 0.0}, tr);
  EXPECT_NEAR(std::abs(phi.amplitudes()(tr.index(0, 0))), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::abs(phi.amplitudes()(tr.index(1, 0))), std::sqrt(0.5), 1e-15);
  const KetState g0 = product_state({0.0, 0.0}, {0.0, 0.0}, tr);
  EXPECT_NEAR(overlap_probability(g0, fock(tr, 0, 0)), 1.0, 1e-15);
}

TEST(CoordinateMap, CaptionPoints) {
  // q1 + i p1 = tau sqrt(2 / (1 + |tau|^2)), q2 + i p2 = sqrt(2) beta
  const PhasePoint c1 = labels_to_phase({0.825, 0.0}, {0.0, 5.4461});
  EXPECT_NEAR(c1.q1, 0.899981405535, 1e-11);
  EXPECT_NEAR(c1.p1, 0.0, 1e-15);
  EXPECT_NEAR(c1.q2, 0.0, 1e-15);
  EXPECT_NEAR(c1.p2, 7.70194848204, 1e-10);

  const PhasePoint r1 = labels_to_phase({7.0, 0.0}, {0.0, 3.5384});
  EXPECT_NEAR(r1.q1, 1.4, 1e-14);
  EXPECT_NEAR(r1.p2, 5.0040532691, 1e-10);

  const PhasePoint origin = labels_to_phase({0.0, 0.0}, {0.0, 0.0});
  EXPECT_EQ(origin, PhasePoint{});
}

TEST(CoordinateMap, RoundTrip) {
  for (Complex tau : {Complex(0.1, 0.2), Complex(-0.9419, 1.4653), Complex(3.0, -2.0)}) {
    const Complex beta(0.4, -1.3);
    const CoherentLabels back = phase_to_labels(labels_to_phase(tau, beta));
    EXPECT_NEAR(std::abs(back.tau - tau), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(back.beta - beta), 0.0, 1e-14);
  }
  EXPECT_THROW(phase_to_labels(PhasePoint{1.2, 1.0, 0.0, 0.0}), PreconditionError);
}

TEST(Expectations, VacuumQuadrature) {
  const FockTruncation tr(10);
  const auto ops = build_operators(tr);
  const OperatorMatrix G = 0.5 * (ops.A + ops.A_dag);
  const KetState phi = product_state({1.0, 0.0}, {0.0, 0.0}, tr);
  EXPECT_NEAR(std::abs(expectation(G, phi)), 0.0, 1e-15);
  EXPECT_NEAR(variance(G, phi), 0.25, 1e-15);
  EXPECT_NEAR(expectation(ops.N, fock(tr, 0, 2)).real(), 2.0, 1e-15);
}

}  // namespace
}  // namespace chaoslab
