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

// Mean-field limit of the squeezed-frame Hamiltonian: coherent-state
// expectation of H_eff as a function of (q1, p1, q2, p2), Hamilton's
// equations and Poincare sections at q2 = 0, p2 > 0.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core/model.hpp"
#include "core/quantum_core.hpp"

namespace chaoslab {

/// H_cl = (da/2)(q1^2 + p1^2 - 1) + (Oc/2)(q2^2 + p2^2)
///        + g~ q1 q2 sqrt(4 - 2(q1^2 + p1^2)) - (g/2) e^{-r} p1 p2 sqrt(...)
/// Throws PreconditionError outside the Bloch domain q1^2 + p1^2 <= 2.
double classical_energy(const PhasePoint& pt, const SystemParams& p);

struct PhaseGradient {
  double dq1 = 0.0, dp1 = 0.0, dq2 = 0.0, dp2 = 0.0;
};

/// Analytic gradient; requires q1^2 + p1^2 <= 2 - 1e-9.
PhaseGradient classical_gradient(const PhasePoint& pt, const SystemParams& p);

struct ClassicalOptions {
  double tol = 1e-12;              ///< per-step relative and absolute tolerance
  double boundary_margin = 1e-6;   ///< start points need q1^2 + p1^2 < 2 - margin
  double min_step = 1e-10;
  std::size_t record_stride = 1;   ///< keep every n-th accepted step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> points;
  double energy_drift = 0.0;  ///< max |H_cl - E0| / |E0|
  long steps = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of Hamilton's equations, carried out
/// on the Bloch sphere so orbits may pass through the |E> pole (q1^2 + p1^2 = 2),
/// where the canonical chart is singular.
Trajectory integrate_trajectory(const PhasePoint& start, const SystemParams& p, double t_end,
                                const ClassicalOptions& opts = {});

struct SectionPoint {
  double q1 = 0.0, p1 = 0.0;
  double q2 = 0.0, p2 = 0.0;  ///< refined crossing, |q2| < 1e-10
  double time = 0.0;
  std::size_t seed = 0;
};

struct PoincareSection {
  std::vector<SectionPoint> crossings;
  double energy = 0.0;
  SystemParams params;
  double energy_drift = 0.0;
  bool exhausted = false;  ///< t_max reached before max_crossings
  std::vector<std::size_t> inadmissible_seeds;
};

/// Records (q1, p1) at each crossing of q2 = 0 with p2 > 0, refined by bisection
/// on the dense-output interpolant.
PoincareSection poincare_section(const PhasePoint& start, const SystemParams& p, std::size_t max_crossings,
                                 double t_max, const ClassicalOptions& opts = {});

struct ShellRoot {
  double p2 = 0.0;
  bool ambiguous = false;  ///< two positive roots; the larger one is returned
};

/// Solves H_cl(q1, p1, 0, p2) = E for p2 > 0.
std::optional<ShellRoot> solve_p2_on_shell(double q1, double p1, double energy, const SystemParams& p);

/// Union of per-seed sections on the energy shell E; seed order is preserved.
/// Throws PreconditionError when no seed lies on the shell.
PoincareSection section_scan(const std::vector<std::pair<double, double>>& seeds, const SystemParams& p,
                             double energy, std::size_t crossings_per_seed, double t_max,
                             const ClassicalOptions& opts = {}, int threads = 1);

/// Ring plus radial lattice of seeds inside the Bloch disk.
std::vector<std::pair<double, double>> default_seeds(int rings = 6, int spokes = 8);

/// Closed-curve test for a set of section points, sorted by polar angle about
/// their centroid. A ring visited in angular order has a tour length equal to
/// its hull perimeter; a scattered cloud zig-zags and the ratio grows with the
/// number of points.
struct CurveStatistic {
  double max_gap = 0.0;
  double median_gap = 0.0;
  double gap_ratio = 0.0;     ///< max_gap / median_gap (reported only)
  double tour_ratio = 0.0;    ///< angular tour length / convex-hull perimeter
  bool closed = false;        ///< tour_ratio < kClosedTourRatio
};

inline constexpr double kClosedTourRatio = 1.5;

CurveStatistic closed_curve_statistic(const std::vector<SectionPoint>& points);

}  // namespace chaoslab
