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
#include <numbers>

#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/model.hpp"

namespace chaoslab {
namespace {

double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
}

const SystemParams kSetA = SystemParams::from_squeezing(0.02, 2e-4, 4.0);
const SystemParams kSetB = SystemParams::from_squeezing(0.75, 0.0375, 2.0);

// Closed-form values evaluated independently at 30 significant digits.
TEST(DerivedParams, SetAtR4) {
  const DerivedParams d = derive_params(kSetA);
  EXPECT_NEAR(d.g_tilde, 0.0054598150033144239, 1e-15);
  EXPECT_NEAR(d.omega_c_eff, 0.00067092518030234129, 1e-15);
  EXPECT_NEAR(d.eta, 29.809583225043562, 1e-10);
  EXPECT_NEAR(d.g_crit, 0.0018315637858157456, 1e-15);
  EXPECT_EQ(d.phase, Phase::superradiant);
  EXPECT_TRUE(d.eta_semiclassical);
}

TEST(DerivedParams, SetAtR12) {
  const DerivedParams d = derive_params(SystemParams::from_squeezing(0.02, 2e-4, 1.2));
  EXPECT_NEAR(d.g_tilde, 0.00033201169227365475, 1e-15);
  EXPECT_NEAR(d.omega_c_eff, 0.17995492308163728, 1e-14);
  EXPECT_NEAR(d.eta, 0.11113894333931014, 1e-14);
  EXPECT_NEAR(d.g_crit, 0.02999624335493007, 1e-14);
  EXPECT_EQ(d.phase, Phase::normal);
}

TEST(DerivedParams, SetB) {
  const DerivedParams d = derive_params(kSetB);
  EXPECT_NEAR(d.g_tilde, 0.13854480185494969, 1e-14);
  EXPECT_NEAR(d.omega_c_eff, 0.036618993473686533, 1e-14);
  EXPECT_NEAR(d.eta, 20.481174627012365, 1e-11);
  EXPECT_NEAR(d.g_crit, 0.08286169969483021, 1e-14);
  EXPECT_EQ(d.phase, Phase::superradiant);
}

TEST(DerivedParams, NoSqueezing) {
  const DerivedParams d = derive_params(SystemParams::from_squeezing(0.3, 0.1, 0.0));
  EXPECT_DOUBLE_EQ(d.g_tilde, 0.05);
  EXPECT_DOUBLE_EQ(d.omega_c_eff, 1.0);
  EXPECT_DOUBLE_EQ(d.eta, 0.3);
}

TEST(SystemParams, DriveAndSqueezingAgree) {
  const SystemParams p = SystemParams::from_drive(0.02, 2e-4, std::tanh(8.0));
  EXPECT_NEAR(p.r, 4.0, 1e-9);
  EXPECT_NEAR(kSetA.lambda(), std::tanh(8.0), 1e-15);
  EXPECT_THROW(SystemParams::from_drive(0.02, 2e-4, 1.0), PreconditionError);
  EXPECT_THROW(SystemParams::from_squeezing(0.02, -1.0, 1.0), PreconditionError);
  EXPECT_THROW(SystemParams::from_squeezing(0.02, 1.0, -0.1), PreconditionError);
}

TEST(Hamiltonians, Hermitian) {
  const FockTruncation tr(30);
  EXPECT_LT(build_H_eff(kSetA, tr).hermiticity_defect(), 1e-12);
  EXPECT_LT(build_H_eff(kSetB, tr).hermiticity_defect(), 1e-12);
  const SystemParams p = SystemParams::from_drive(0.1, 0.05, 0.5);
  EXPECT_LT(build_H_rotated(p, tr).hermiticity_defect(), 1e-12);
  EXPECT_TRUE(build_H_eff(kSetA, tr).hermitian_flag());
}

TEST(Hamiltonians, EffectiveEqualsRotatedWithoutSqueezing) {
  const FockTruncation tr(25);
  const SystemParams p = SystemParams::from_squeezing(0.37, 0.11, 0.0);
  EXPECT_LT(max_abs_diff(build_H_eff(p, tr), build_H_rotated(p, tr)), 1e-12);
}

TEST(Hamiltonians, RabiVacuumEnergy) {
  const FockTruncation tr(10);
  const KetState g0 = KetState::basis(tr.dim(), tr.index(0, 0));
  EXPECT_NEAR(expectation(build_H_rabi(kSetA, tr), g0).real(), -0.01, 1e-15);
}

TEST(Hamiltonians, RotatedDecoupledIsDiagonal) {
  const FockTruncation tr(8);
  const SystemParams p = SystemParams::from_squeezing(0.3, 0.0, 0.0);
  const ComplexMatrix h = build_H_rotated(p, tr).dense();
  const ComplexMatrix off = h - ComplexMatrix(h.diagonal().asDiagonal());
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  for (int s = 0; s < 2; ++s)
    for (int n = 0; n <= 8; ++n)
      EXPECT_NEAR(h(tr.index(s, n), tr.index(s, n)).real(), (s ? 0.15 : -0.15) + n, 1e-15);
}

TEST(Hamiltonians, JaynesCummingsConservesExcitations) {
  const FockTruncation tr(15);
  const OperatorSet o = build_operators(tr);
  const OperatorMatrix excitations = o.N + o.Sp * o.Sm;
  const SystemParams p = SystemParams::from_squeezing(0.4, 0.13, 0.0);
  EXPECT_LT(commutator(build_H_rotated(p, tr), excitations).max_abs(), 1e-14);
}

TEST(Hamiltonians, ErrorTermScaling) {
  const FockTruncation tr(12);
  EXPECT_LT(max_abs_diff(build_H_eff(kSetA, tr, 0.0), build_H_rabi(kSetA, tr)), 1e-18);
  EXPECT_LT(max_abs_diff(build_H_eff(kSetA, tr), build_H_rabi(kSetA, tr) + build_H_err(kSetA, tr)), 1e-18);
}

TEST(LabHamiltonian, DrivePhases) {
  const FockTruncation tr(10);
  const SystemParams p = SystemParams::from_drive(0.2, 0.0, 0.4, 1.3);
  const SystemParams undriven = SystemParams::from_drive(0.2, 0.0, 0.0, 1.3);
  const OperatorSet o = build_operators(tr);
  const OperatorMatrix pairs = o.A_dag * o.A_dag + o.A * o.A;
  const OperatorMatrix static_part = build_H_lab(undriven, 0.0, tr);
  EXPECT_LT(max_abs_diff(build_H_lab(p, 0.0, tr), static_part - 0.2 * pairs), 1e-14);
  EXPECT_LT(max_abs_diff(build_H_lab(p, std::numbers::pi / 1.3, tr), static_part + 0.2 * pairs), 1e-13);
}

TEST(LabHamiltonian, NoDriveIsStatic) {
  const FockTruncation tr(10);
  const SystemParams p = SystemParams::from_drive(0.2, 0.05, 0.0, 1.3);
  const OperatorMatrix h0 = build_H_lab(p, 0.0, tr);
  for (double t : {0.7, 3.1, 42.0}) EXPECT_LT(max_abs_diff(build_H_lab(p, t, tr), h0), 1e-15);
  // static JCM part: (omega_a/2) sz + omega_c n + g (a^dag s- + a s+)
  const OperatorSet o = build_operators(tr);
  const OperatorMatrix jcm = 0.5 * p.omega_a() * o.Sz + p.omega_c() * o.N + 0.05 * (o.A_dag * o.Sm + o.A * o.Sp);
  EXPECT_LT(max_abs_diff(h0, jcm), 1e-15);
}

TEST(LabHamiltonian, MatrixFreeActionMatchesAssembly) {
  const FockTruncation tr(40);
  const LabHamiltonian lab(SystemParams::from_drive(0.02, 2e-4, 0.6, 1.0), tr);
  const KetState psi = product_state({0.4, 0.3}, {1.2, -0.7}, tr);
  for (double t : {0.0, 0.37, 5.0}) {
    ComplexVector out(tr.dim());
    lab.apply(t, psi.amplitudes(), out);
    EXPECT_LT((out - lab.at(t).apply(psi.amplitudes())).cwiseAbs().maxCoeff(), 1e-13);
  }
  EXPECT_GE(lab.norm_bound(), lab.at(0.3).max_abs());
}

TEST(Squeezing, ZeroIsIdentity) {
  const FockTruncation tr(20);
  EXPECT_LT(max_abs_diff(squeeze_unitary(0.0, tr), OperatorMatrix::identity(tr.dim())), 1e-15);
  EXPECT_LT(max_abs_diff(rotation_unitary(kSetA, 0.0, tr), OperatorMatrix::identity(tr.dim())), 1e-15);
}

TEST(Squeezing, BogoliubovRelationOnInterior) {
  // squeezed columns spread ~ n r photons, so the operator identity is exact
  // on the interior block only while r n_max stays small
  const FockTruncation tr(60);
  const double r = 0.05;
  const OperatorMatrix U = squeeze_unitary(r, tr);
  const OperatorSet o = build_operators(tr);
  const ComplexMatrix lhs = (U * o.A * U.adjoint()).dense();
  const ComplexMatrix rhs = (std::cosh(r) * o.A + std::sinh(r) * o.A_dag).dense();
  const int interior = tr.n_max() - kSqueezeMargin;
  double worst = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int n = 0; n < interior; ++n)
      for (int m = 0; m < interior; ++m) {
        const auto i = tr.index(s, n), j = tr.index(s, m);
        worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
      }
  EXPECT_LT(worst, 1e-6);
}

TEST(Squeezing, BogoliubovRelationOnStates) {
  // <U^dag psi| a |U^dag psi> = cosh r <a> + sinh r <a^dag> for a compact state
  const FockTruncation tr(200);
  const OperatorSet o = build_operators(tr);
  const KetState psi = product_state({0.3, -0.4}, {1.2, -0.7}, tr);
  for (double r : {0.3, 0.8, 1.2}) {
    const KetState moved = apply_squeeze(r, psi, tr, /*adjoint=*/true);
    const Complex lhs = expectation(o.A, moved);
    const Complex rhs = std::cosh(r) * expectation(o.A, psi) + std::sinh(r) * expectation(o.A_dag, psi);
    EXPECT_LT(std::abs(lhs - rhs), 1e-6) << "r = " << r;
  }
}

TEST(Squeezing, RotatedSqueezedVacuum) {
  const FockTruncation tr(80);
  const double angle = 0.37;
  const ComplexVector plain = squeezed_vacuum(0.6, tr).amplitudes();
  const ComplexVector turned = squeezed_vacuum(0.6, tr, angle).amplitudes();
  for (Eigen::Index n = 0; n < plain.size(); ++n)
    EXPECT_NEAR(std::abs(turned(n) - plain(n) * std::polar(1.0, angle * static_cast<double>(n))), 0.0, 1e-15);
}

TEST(Squeezing, SqueezedVacuumMatchesUnitary) {
  const FockTruncation tr(120);
  const double r = 0.8;
  const KetState vac = KetState::basis(tr.dim(), tr.index(0, 0));
  const KetState expected = tensor_product(KetState::basis(2, 0), squeezed_vacuum(r, tr));
  EXPECT_NEAR(overlap_probability(KetState::normalized(squeeze_unitary(r, tr).apply(vac.amplitudes())), expected),
              1.0, 1e-12);
  const KetState applied = apply_squeeze(r, vac, tr);
  EXPECT_LT((applied.amplitudes() - expected.amplitudes()).norm(), 1e-9);
  const KetState back = apply_squeeze(r, applied, tr, /*adjoint=*/true);
  EXPECT_NEAR(std::abs(back.amplitudes()(0)), 1.0, 1e-9);
}

TEST(Squeezing, TruncationPrecondition) {
  EXPECT_THROW(squeeze_unitary(3.0, FockTruncation(60)), PreconditionError);
  const FockTruncation tr(60);
  EXPECT_THROW(apply_squeeze(3.0, KetState::basis(tr.dim(), 0), tr), PreconditionError);
  EXPECT_GT(squeezed_vacuum_tail(3.0, 40), 0.1);
  EXPECT_EQ(squeezed_vacuum_tail(0.0, 4), 0.0);
}

TEST(FrameEquivalence, PureRotationWithoutSqueezing) {
  const FockTruncation tr(24);
  const SystemParams p = SystemParams::from_squeezing(0.3, 0.05, 0.0, 1.0);
  const KetState psi = product_state({0.6, -0.2}, {0.9, 0.4}, tr);
  FrameCheckOptions opts;
  opts.tolerance = 1e-10;
  const FrameCheckResult res = verify_frame_equivalence(p, psi, 5.0, 5, tr, opts);
  ASSERT_EQ(res.overlaps.size(), 6u);
  EXPECT_DOUBLE_EQ(res.times.front(), 0.0);
  EXPECT_NEAR(res.overlaps.front(), 1.0, 1e-12);
  EXPECT_GT(res.min_overlap, 1.0 - 1e-8);
}

TEST(FrameEquivalence, ModerateSqueezing) {
  const FockTruncation tr(120);
  const SystemParams p = SystemParams::from_squeezing(0.2, 0.02, 0.5, 1.0);
  const KetState psi = tensor_product(KetState::basis(2, 0), squeezed_vacuum(0.3, tr));
  const FrameCheckResult res = verify_frame_equivalence(p, psi, 2.0, 4, tr);
  EXPECT_GT(res.min_overlap, 1.0 - 1e-6);
  EXPECT_LT(res.lab_norm_drift, 1e-7);
}

}  // namespace
}  // namespace chaoslab
