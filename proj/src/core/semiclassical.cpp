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

#include "core/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "core/errors.hpp"
#include "core/ode.hpp"
#include "core/parallel.hpp"

namespace chaoslab {

namespace {

// Integration variables: Bloch vector (X, Y, Z) of the qubit and the cavity
// quadratures (q2, p2). With s = sqrt(2 - rho), X = q1 s, Y = p1 s and
// Z = rho - 1, so the canonical chart maps onto the sphere and the |E> pole
// (rho = 2), where the chart is singular, becomes a regular point.
using State = Eigen::Matrix<double, 5, 1>;

struct Coefficients {
  double delta_a, omega_c, g_tilde, err;

  explicit Coefficients(const SystemParams& p) {
    const DerivedParams d = derive_params(p);
    delta_a = p.delta_a;
    omega_c = d.omega_c_eff;
    g_tilde = d.g_tilde;
    err = 0.5 * p.g * std::exp(-p.r);
  }

  double energy(double q1, double p1, double q2, double p2) const {
    const double rho = q1 * q1 + p1 * p1;
    const double s = std::sqrt(4.0 - 2.0 * rho);
    return 0.5 * delta_a * (rho - 1.0) + 0.5 * omega_c * (q2 * q2 + p2 * p2) + g_tilde * q1 * q2 * s -
           err * p1 * p2 * s;
  }

  // Same function on the sphere: H = (da/2) Z + (Oc/2)(q2^2 + p2^2)
  //   + sqrt2 g~ q2 X - sqrt2 err p2 Y.
  double energy(const State& y) const {
    return 0.5 * delta_a * y(2) + 0.5 * omega_c * (y(3) * y(3) + y(4) * y(4)) +
           std::numbers::sqrt2 * (g_tilde * y(3) * y(0) - err * y(4) * y(1));
  }

  // Returns NaN outside the open Bloch disk.
  PhaseGradient gradient(double q1, double p1, double q2, double p2) const {
    const double rho = q1 * q1 + p1 * p1;
    if (!(rho < 2.0)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan, nan, nan};
    }
    const double s = std::sqrt(4.0 - 2.0 * rho);
    const double coupling = g_tilde * q1 * q2 - err * p1 * p2;  // coefficient of s
    return {
        delta_a * q1 + g_tilde * q2 * s - 2.0 * q1 * coupling / s,
        delta_a * p1 - err * p2 * s - 2.0 * p1 * coupling / s,
        omega_c * q2 + g_tilde * q1 * s,
        omega_c * p2 - err * p1 * s,
    };
  }

  // Hamilton's equations. The canonical brackets induce {X, Y} = -2 Z (cyclic),
  // hence dS/dt = 2 S x B with B = dH/dS; the oscillator keeps
  // dq2/dt = dH/dp2 and dp2/dt = -dH/dq2.
  State flow(const State& y) const {
    const double bx = std::numbers::sqrt2 * g_tilde * y(3);
    const double by = -std::numbers::sqrt2 * err * y(4);
    const double bz = 0.5 * delta_a;
    State d;
    d(0) = 2.0 * (y(1) * bz - y(2) * by);
    d(1) = 2.0 * (y(2) * bx - y(0) * bz);
    d(2) = 2.0 * (y(0) * by - y(1) * bx);
    d(3) = omega_c * y(4) - std::numbers::sqrt2 * err * y(1);
    d(4) = -(omega_c * y(3) + std::numbers::sqrt2 * g_tilde * y(0));
    return d;
  }
};

State to_state(const PhasePoint& pt) {
  const double rho = pt.bloch_radius_sq();
  const double s = std::sqrt(std::max(0.0, 2.0 - rho));
  State y;
  y << pt.q1 * s, pt.p1 * s, rho - 1.0, pt.q2, pt.p2;
  return y;
}

// Inverse chart; 1 - Z is evaluated as (X^2 + Y^2) / (1 + Z) near the pole.
std::pair<double, double> chart(const State& y) {
  const double n = std::sqrt(y(0) * y(0) + y(1) * y(1) + y(2) * y(2));
  const double x = y(0) / n, yy = y(1) / n, z = y(2) / n;
  const double one_minus_z = z > 0.0 ? (x * x + yy * yy) / (1.0 + z) : 1.0 - z;
  if (!(one_minus_z > 0.0)) return {0.0, 0.0};
  const double inv = 1.0 / std::sqrt(one_minus_z);
  return {x * inv, yy * inv};
}

PhasePoint to_point(const State& y) {
  const auto [q1, p1] = chart(y);
  return {q1, p1, y(3), y(4)};
}

double scaled_error(const State& err, const State& y0, const State& y1, double tol) {
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    sum += (err(i) / sc) * (err(i) / sc);
  }
  const double e = std::sqrt(sum / 5.0);
  return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
}

void check_start(const PhasePoint& pt, const ClassicalOptions& opts) {
  if (!(pt.bloch_radius_sq() < 2.0 - opts.boundary_margin)) {
    std::ostringstream os;
    os << "initial point outside the Bloch-domain interior: q1^2 + p1^2 = " << pt.bloch_radius_sq();
    throw PreconditionError(os.str());
  }
}

// Drives the adaptive integrator and hands every accepted step to `observe`,
// which returns false to stop early.
template <class Observer>
long drive(const Coefficients& co, const State& start, double t_end, const ClassicalOptions& opts, double& drift,
           Observer&& observe) {
  const auto rhs = [&co](double, const State& y) { return co.flow(y); };
  const double e0 = co.energy(start);
  const double e_scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  drift = 0.0;

  State y = start;
  State k1 = rhs(0.0, y);
  double t = 0.0;
  double h = std::min(t_end, 1e-2 / std::max(1e-12, k1.norm() / std::max(1.0, y.norm())));
  long steps = 0;
  while (t < t_end) {
    const double step = std::min(h, t_end - t);
    if (step < opts.min_step) {
      std::ostringstream os;
      os << "classical integrator: step size underflow at t = " << t;
      throw ConvergenceError(os.str());
    }
    const auto trial = ode::dormand_prince_attempt(rhs, t, y, k1, step);
    const double err = scaled_error(trial.error, trial.y0, trial.y1, opts.tol);
    h = step * ode::next_step_factor(err);
    if (!(err <= 1.0)) continue;
    t = step >= t_end - t ? t_end : t + step;
    y = trial.y1;
    k1 = trial.k7;
    ++steps;
    drift = std::max(drift, std::abs(co.energy(y) - e0) / e_scale);
    if (!observe(trial, t)) break;
  }
  return steps;
}

}  // namespace

double classical_energy(const PhasePoint& pt, const SystemParams& p) {
  if (!pt.in_bloch_domain()) {
    std::ostringstream os;
    os << "classical_energy: q1^2 + p1^2 = " << pt.bloch_radius_sq() << " exceeds 2";
    throw PreconditionError(os.str());
  }
  return Coefficients(p).energy(pt.q1, pt.p1, pt.q2, pt.p2);
}

PhaseGradient classical_gradient(const PhasePoint& pt, const SystemParams& p) {
  if (pt.bloch_radius_sq() > 2.0 - 1e-9) {
    std::ostringstream os;
    os << "classical_gradient: q1^2 + p1^2 = " << pt.bloch_radius_sq() << " too close to the Bloch boundary";
    throw PreconditionError(os.str());
  }
  return Coefficients(p).gradient(pt.q1, pt.p1, pt.q2, pt.p2);
}

Trajectory integrate_trajectory(const PhasePoint& start, const SystemParams& p, double t_end,
                                const ClassicalOptions& opts) {
  check_start(start, opts);
  if (!(t_end >= 0.0)) throw InvalidArgument("integrate_trajectory: t_end must be >= 0");
  const Coefficients co(p);
  Trajectory out;
  out.times.push_back(0.0);
  out.points.push_back(start);
  if (t_end == 0.0) return out;
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);
  const State y0 = to_state(start);
  std::size_t accepted = 0;
  double last_t = 0.0;
  State last_y = y0;
  out.steps = drive(co, y0, t_end, opts, out.energy_drift, [&](const auto& step, double t) {
    last_t = t;
    last_y = step.y1;
    if (++accepted % stride == 0) {
      out.times.push_back(t);
      out.points.push_back(to_point(step.y1));
    }
    return true;
  });
  if (out.times.back() != last_t) {
    out.times.push_back(last_t);
    out.points.push_back(to_point(last_y));
  }
  return out;
}

PoincareSection poincare_section(const PhasePoint& start, const SystemParams& p, std::size_t max_crossings,
                                 double t_max, const ClassicalOptions& opts) {
  check_start(start, opts);
  const Coefficients co(p);
  PoincareSection sec;
  sec.params = p;
  sec.energy = co.energy(start.q1, start.p1, start.q2, start.p2);
  if (max_crossings == 0) return sec;
  const State y0 = to_state(start);
  drive(co, y0, t_max, opts, sec.energy_drift, [&](const auto& step, double) {
    const double a = step.y0(3), b = step.y1(3);
    if (!((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0))) return true;
    // bisection on the dense-output polynomial
    double lo = 0.0, hi = 1.0;
    State mid = step.y1;
    double theta = 1.0;
    if (b != 0.0) {
      for (int it = 0; it < 200; ++it) {
        theta = 0.5 * (lo + hi);
        mid = step.interpolate(theta);
        if (std::abs(mid(3)) < 1e-10 && it >= 12) break;
        if ((mid(3) < 0.0) == (a < 0.0)) lo = theta;
        else hi = theta;
      }
    }
    if (!(std::abs(mid(3)) < 1e-10) || !(mid(4) > 0.0)) return true;
    const auto [q1, p1] = chart(mid);
    sec.crossings.push_back({q1, p1, mid(3), mid(4), step.t + theta * step.h, 0});
    return sec.crossings.size() < max_crossings;
  });
  sec.exhausted = sec.crossings.size() < max_crossings;
  return sec;
}

std::optional<ShellRoot> solve_p2_on_shell(double q1, double p1, double energy, const SystemParams& p) {
  const double rho = q1 * q1 + p1 * p1;
  if (rho > 2.0) return std::nullopt;
  const Coefficients co(p);
  const double s = std::sqrt(std::max(0.0, 4.0 - 2.0 * rho));
  const double a = 0.5 * co.omega_c;
  const double b = -co.err * p1 * s;
  const double c = 0.5 * co.delta_a * (rho - 1.0) - energy;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || !(a > 0.0)) return std::nullopt;
  const double root = std::sqrt(disc);
  // numerically stable pair of roots
  const double qv = -0.5 * (b + std::copysign(root, b == 0.0 ? 1.0 : b));
  double r1 = qv / a;
  double r2 = qv != 0.0 ? c / qv : -r1;
  if (r1 < r2) std::swap(r1, r2);
  if (r1 > 0.0 && r2 > 0.0) return ShellRoot{r1, true};
  if (r1 > 0.0) return ShellRoot{r1, false};
  return std::nullopt;
}

PoincareSection section_scan(const std::vector<std::pair<double, double>>& seeds, const SystemParams& p,
                             double energy, std::size_t crossings_per_seed, double t_max,
                             const ClassicalOptions& opts, int threads) {
  std::vector<std::optional<PoincareSection>> per_seed(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    const auto [q1, p1] = seeds[i];
    if (!(q1 * q1 + p1 * p1 < 2.0 - opts.boundary_margin)) return;
    const auto root = solve_p2_on_shell(q1, p1, energy, p);
    if (!root) return;
    per_seed[i] = poincare_section(PhasePoint{q1, p1, 0.0, root->p2}, p, crossings_per_seed, t_max, opts);
  });
  PoincareSection merged;
  merged.params = p;
  merged.energy = energy;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!per_seed[i]) {
      merged.inadmissible_seeds.push_back(i);
      continue;
    }
    for (SectionPoint pt : per_seed[i]->crossings) {
      pt.seed = i;
      merged.crossings.push_back(pt);
    }
    merged.energy_drift = std::max(merged.energy_drift, per_seed[i]->energy_drift);
    merged.exhausted = merged.exhausted || per_seed[i]->exhausted;
  }
  if (merged.inadmissible_seeds.size() == seeds.size())
    throw PreconditionError("section_scan: no seed lies on the requested energy shell");
  return merged;
}

std::vector<std::pair<double, double>> default_seeds(int rings, int spokes) {
  std::vector<std::pair<double, double>> seeds;
  const double r_max = std::sqrt(2.0) * 0.97;
  for (int i = 1; i <= rings; ++i) {
    const double rad = r_max * i / rings;
    for (int k = 0; k < spokes; ++k) {
      const double ang = 2.0 * std::numbers::pi * (k + 0.5 * (i % 2)) / spokes;
      seeds.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
    }
  }
  return seeds;
}

CurveStatistic closed_curve_statistic(const std::vector<SectionPoint>& points) {
  CurveStatistic st;
  if (points.size() < 8) return st;
  double cq = 0.0, cp = 0.0;
  for (const auto& pt : points) {
    cq += pt.q1;
    cp += pt.p1;
  }
  cq /= static_cast<double>(points.size());
  cp /= static_cast<double>(points.size());
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    order.emplace_back(std::atan2(points[i].p1 - cp, points[i].q1 - cq), i);
  std::sort(order.begin(), order.end());
  std::vector<double> gaps;
  gaps.reserve(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = points[order[i].second];
    const auto& b = points[order[(i + 1) % order.size()].second];
    gaps.push_back(std::hypot(a.q1 - b.q1, a.p1 - b.p1));
  }
  const double tour = [&] {
    double s = 0.0;
    for (double g : gaps) s += g;
    return s;
  }();
  std::vector<double> sorted = gaps;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  st.median_gap = sorted[sorted.size() / 2];
  st.max_gap = *std::max_element(gaps.begin(), gaps.end());
  st.gap_ratio = st.median_gap > 0.0 ? st.max_gap / st.median_gap : std::numeric_limits<double>::infinity();

  // convex hull perimeter (monotone chain)
  std::vector<std::pair<double, double>> pts;
  for (const auto& pt : points) pts.emplace_back(pt.q1, pt.p1);
  std::sort(pts.begin(), pts.end());
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& pt : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0) --k;
    hull[k++] = pt;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    perimeter += std::hypot(a.first - b.first, a.second - b.second);
  }
  st.tour_ratio = perimeter > 0.0 ? tour / perimeter : std::numeric_limits<double>::infinity();
  st.closed = st.tour_ratio < kClosedTourRatio;
  return st;
}

}  // namespace chaoslab
