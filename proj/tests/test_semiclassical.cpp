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
#include "core/semiclassical.hpp"

namespace chaoslab {
namespace {

const SystemParams kSetA = SystemParams::from_squeezing(0.02, 2e-4, 4.0);
const SystemParams kSetB = SystemParams::from_squeezing(0.75, 0.0375, 2.0);

TEST(ClassicalEnergy, Origin) {
  EXPECT_DOUBLE_EQ(classical_energy(PhasePoint{}, kSetA), -0.01);
  EXPECT_DOUBLE_EQ(classical_energy(PhasePoint{}, kSetB), -0.375);
}

// Reference energies evaluated independently at 30 significant digits from
// the preset labels.
TEST(ClassicalEnergy, CaptionPoints) {
  const double c1 = classical_energy(labels_to_phase({0.825, 0.0}, {0.0, 5.4461}), kSetA);
  const double r1 = classical_energy(labels_to_phase({7.0, 0.0}, {0.0, 3.5384}), kSetA);
  const double c2 = classical_energy(labels_to_phase({0.0999, 0.4081}, {0.0, 5.3065}), kSetB);
  const double r2 = classical_energy(labels_to_phase({-0.9419, 1.4653}, {0.0, 3.9644}), kSetB);
  EXPECT_NEAR(c1, 0.0179993096464, 1e-12);
  EXPECT_NEAR(r1, 0.0180001674666, 1e-12);
  EXPECT_NEAR(c2, 0.749998981846, 1e-11);
  EXPECT_NEAR(r2, 0.749999036217, 1e-11);
  EXPECT_NEAR(c2, 0.7501, 5e-4);
}

TEST(ClassicalEnergy, OutsideBlochDomain) {
  EXPECT_THROW(classical_energy(PhasePoint{1.2, 1.0, 0.0, 0.0}, kSetA), PreconditionError);
}

TEST(ClassicalGradient, OriginIsStationary) {
  const PhaseGradient g = classical_gradient(PhasePoint{}, kSetA);
  EXPECT_EQ(g.dq1, 0.0);
  EXPECT_EQ(g.dp1, 0.0);
  EXPECT_EQ(g.dq2, 0.0);
  EXPECT_EQ(g.dp2, 0.0);
}

TEST(ClassicalGradient, DecoupledOscillators) {
  const SystemParams p = SystemParams::from_squeezing(0.3, 0.0, 0.7);
  const double oc = 1.0 / std::cosh(1.4);
  const PhasePoint pt{0.4, -0.3, 1.1, 2.0};
  const PhaseGradient g = classical_gradient(pt, p);
  EXPECT_NEAR(g.dq1, 0.3 * 0.4, 1e-15);
  EXPECT_NEAR(g.dp1, 0.3 * -0.3, 1e-15);
  EXPECT_NEAR(g.dq2, oc * 1.1, 1e-15);
  EXPECT_NEAR(g.dp2, oc * 2.0, 1e-15);
}

TEST(ClassicalGradient, FiniteDifferenceAgreement) {
  for (const auto& [pt, p] : {std::pair{labels_to_phase({0.825, 0.0}, {0.0, 5.4461}), kSetA},
                              std::pair{labels_to_phase({0.0999, 0.4081}, {0.0, 5.3065}), kSetB},
                              std::pair{PhasePoint{-0.3, 0.8, 1.5, -0.4}, kSetB}}) {
    const PhaseGradient g = classical_gradient(pt, p);
    const double h = 1e-6;
    auto fd = [&](int k) {
      PhasePoint a = pt, b = pt;
      double* pa[] = {&a.q1, &a.p1, &a.q2, &a.p2};
      double* pb[] = {&b.q1, &b.p1, &b.q2, &b.p2};
      *pa[k] += h;
      *pb[k] -= h;
      return (classical_energy(a, p) - classical_energy(b, p)) / (2 * h);
    };
    EXPECT_NEAR(g.dq1, fd(0), 1e-6);
    EXPECT_NEAR(g.dp1, fd(1), 1e-6);
    EXPECT_NEAR(g.dq2, fd(2), 1e-6);
    EXPECT_NEAR(g.dp2, fd(3), 1e-6);
  }
}

TEST(Trajectory, HarmonicOracle) {
  const SystemParams p = SystemParams::from_squeezing(0.02, 0.0, 0.0);
  const Trajectory tr = integrate_trajectory(PhasePoint{1.0, 0.0, 1.0, 0.0}, p, 300.0);
  ASSERT_FALSE(tr.points.empty());
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    EXPECT_NEAR(tr.points[i].q1, std::cos(0.02 * tr.times[i]), 1e-6);
    EXPECT_NEAR(tr.points[i].q2, std::cos(tr.times[i]), 1e-6);
  }
  EXPECT_NEAR(tr.times.back(), 300.0, 1e-12);
}

TEST(Trajectory, EnergyDriftAtDefaultTolerance) {
  const Trajectory tr = integrate_trajectory(labels_to_phase({0.0999, 0.4081}, {0.0, 5.3065}), kSetB, 2000.0);
  EXPECT_LT(tr.energy_drift, 1e-8);
}

TEST(Trajectory, TimeReversal) {
  const PhasePoint start = labels_to_phase({-0.9419, 1.4653}, {0.0, 3.9644});
  const Trajectory fwd = integrate_trajectory(start, kSetB, 200.0);
  PhasePoint flipped = fwd.points.back();
  flipped.p1 = -flipped.p1;
  flipped.p2 = -flipped.p2;
  const PhasePoint back = integrate_trajectory(flipped, kSetB, 200.0).points.back();
  EXPECT_NEAR(back.q1, start.q1, 1e-5);
  EXPECT_NEAR(-back.p1, start.p1, 1e-5);
  EXPECT_NEAR(back.q2, start.q2, 1e-5);
  EXPECT_NEAR(-back.p2, start.p2, 1e-5);
}

TEST(Trajectory, RejectsStartOnBoundary) {
  EXPECT_THROW(integrate_trajectory(PhasePoint{std::sqrt(2.0), 0.0, 0.0, 1.0}, kSetA, 1.0), PreconditionError);
}

TEST(PoincareSection, DecoupledQubitCircle) {
  const SystemParams p = SystemParams::from_squeezing(0.3, 0.0, 0.0);
  const PoincareSection s = poincare_section(PhasePoint{0.5, 0.0, 0.0, 1.0}, p, 40, 1e6);
  ASSERT_EQ(s.crossings.size(), 40u);
  for (const auto& c : s.crossings) {
    EXPECT_NEAR(c.q1 * c.q1 + c.p1 * c.p1, 0.25, 1e-6);
    EXPECT_LT(std::abs(c.q2), 1e-10);
    EXPECT_GT(c.p2, 0.0);
  }
}

TEST(PoincareSection, CrossingsAreRefined) {
  const PoincareSection s = poincare_section(labels_to_phase({-0.9419, 1.4653}, {0.0, 3.9644}), kSetB, 100, 1e9);
  ASSERT_EQ(s.crossings.size(), 100u);
  EXPECT_FALSE(s.exhausted);
  for (const auto& c : s.crossings) {
    EXPECT_LT(std::abs(c.q2), 1e-10);
    EXPECT_GT(c.p2, 0.0);
  }
  EXPECT_LT(s.energy_drift, 1e-8);
}

TEST(PoincareSection, ExhaustedHorizon) {
  const PoincareSection s = poincare_section(labels_to_phase({-0.9419, 1.4653}, {0.0, 3.9644}), kSetB, 1000, 50.0);
  EXPECT_TRUE(s.exhausted);
  EXPECT_LT(s.crossings.size(), 1000u);
}

TEST(ClosedCurve, RegularRingAndChaoticCloud) {
  const PoincareSection r1 = poincare_section(labels_to_phase({7.0, 0.0}, {0.0, 3.5384}), kSetA, 300, 1e9);
  const PoincareSection c1 = poincare_section(labels_to_phase({0.825, 0.0}, {0.0, 5.4461}), kSetA, 300, 1e9);
  EXPECT_TRUE(closed_curve_statistic(r1.crossings).closed);
  EXPECT_FALSE(closed_curve_statistic(c1.crossings).closed);
}

TEST(ClosedCurve, ExactCircle) {
  std::vector<SectionPoint> pts;
  for (int k = 0; k < 200; ++k) {
    const double a = 2.0 * std::acos(-1.0) * ((k * 37) % 200) / 200.0;
    pts.push_back(SectionPoint{0.3 + 0.5 * std::cos(a), 0.5 * std::sin(a), 0.0, 1.0, static_cast<double>(k), 0});
  }
  const CurveStatistic st = closed_curve_statistic(pts);
  EXPECT_NEAR(st.tour_ratio, 1.0, 1e-9);
  EXPECT_TRUE(st.closed);
  EXPECT_NEAR(st.gap_ratio, 1.0, 1e-6);
}

TEST(ShellRoot, QuadraticOracle) {
  // roots of the shell quadratic, evaluated independently
  const auto c1 = solve_p2_on_shell(0.90003, 0.0, 0.018, kSetA);
  ASSERT_TRUE(c1.has_value());
  EXPECT_NEAR(c1->p2, 7.70191280615, 1e-9);
  EXPECT_NEAR(c1->p2, 7.7019, 1e-3);
  const auto r1 = solve_p2_on_shell(1.4, 0.0, 0.018, kSetA);
  ASSERT_TRUE(r1.has_value());
  EXPECT_NEAR(r1->p2, 5.00400338819, 1e-9);
  const auto c2 = solve_p2_on_shell(0.13026, 0.53208, 0.75, kSetB);
  ASSERT_TRUE(c2.has_value());
  EXPECT_NEAR(c2->p2, 7.5045311864, 1e-8);
  EXPECT_FALSE(solve_p2_on_shell(0.0, 0.0, -1.0, kSetA).has_value());
  EXPECT_FALSE(solve_p2_on_shell(1.5, 1.5, 0.018, kSetA).has_value());
}

TEST(SectionScan, SingleSeedMatchesSection) {
  const PhasePoint r2 = labels_to_phase({-0.9419, 1.4653}, {0.0, 3.9644});
  const PoincareSection direct = poincare_section(r2, kSetB, 50, 1e9);
  const PoincareSection scan = section_scan({{r2.q1, r2.p1}}, kSetB, direct.energy, 50, 1e9);
  ASSERT_EQ(scan.crossings.size(), direct.crossings.size());
  for (std::size_t i = 0; i < scan.crossings.size(); ++i) {
    EXPECT_NEAR(scan.crossings[i].q1, direct.crossings[i].q1, 1e-9);
    EXPECT_NEAR(scan.crossings[i].p1, direct.crossings[i].p1, 1e-9);
  }
}

TEST(SectionScan, DeterministicAcrossThreadsAndFlagsInadmissibleSeeds) {
  std::vector<std::pair<double, double>> seeds = {{0.2, 0.1}, {1.3, 1.3}, {-0.5, 0.4}};
  const PoincareSection a = section_scan(seeds, kSetB, 0.75, 20, 1e9, {}, 1);
  const PoincareSection b = section_scan(seeds, kSetB, 0.75, 20, 1e9, {}, 3);
  ASSERT_EQ(a.crossings.size(), b.crossings.size());
  for (std::size_t i = 0; i < a.crossings.size(); ++i) EXPECT_EQ(a.crossings[i].q1, b.crossings[i].q1);
  EXPECT_EQ(a.inadmissible_seeds, std::vector<std::size_t>{1});
  EXPECT_THROW(section_scan({{1.3, 1.3}}, kSetB, 0.75, 5, 1e9), PreconditionError);
}

TEST(DefaultSeeds, InsideBlochDisk) {
  const auto seeds = default_seeds();
  EXPECT_FALSE(seeds.empty());
  for (const auto& [q, p] : seeds) EXPECT_LT(q * q + p * p, 2.0);
}

}  // namespace
}  // namespace chaoslab
