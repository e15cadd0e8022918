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

// Embedded Dormand-Prince 5(4) Runge-Kutta pair with FSAL and the
// continuous extension of Hairer's DOPRI5 (4th-order dense output).
// State must support vector arithmetic (Eigen vectors).

#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace chaoslab::ode {

struct DormandPrinceTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

/// One attempted step from (t, y) with derivative k1 = f(t, y).
template <class State>
struct DormandPrinceStep {
  double t = 0.0, h = 0.0;
  State y0, y1, k1, k7, error;
  State cont5;  // dense-output correction term

  /// Dense output at t0 + theta * h, theta in [0, 1].
  State interpolate(double theta) const {
    const double theta1 = 1.0 - theta;
    State diff = y1 - y0;
    State bspl = h * k1 - diff;
    State r4 = diff - h * k7 - bspl;
    return y0 + theta * (diff + theta1 * (bspl + theta * (r4 + theta1 * cont5)));
  }
  State at(double time) const { return interpolate((time - t) / h); }
};

template <class State, class Rhs>
DormandPrinceStep<State> dormand_prince_attempt(const Rhs& f, double t, const State& y, const State& k1, double h) {
  using T = DormandPrinceTableau;
  const State k2 = f(t + T::c2 * h, State(y + h * (T::a21 * k1)));
  const State k3 = f(t + T::c3 * h, State(y + h * (T::a31 * k1 + T::a32 * k2)));
  const State k4 = f(t + T::c4 * h, State(y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3)));
  const State k5 = f(t + T::c5 * h, State(y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4)));
  const State k6 =
      f(t + h, State(y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5)));
  DormandPrinceStep<State> s;
  s.t = t;
  s.h = h;
  s.y0 = y;
  s.k1 = k1;
  s.y1 = y + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
  s.k7 = f(t + h, s.y1);
  s.error = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * s.k7);
  s.cont5 = h * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 + T::d5 * k5 + T::d6 * k6 + T::d7 * s.k7);
  return s;
}

/// Standard step-size controller (Hairer, Norsett, Wanner) for a scaled error
/// norm `err` where err <= 1 accepts the step.
inline double next_step_factor(double err) {
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
  if (err == 0.0) return fac_max;
  const double f = safety * std::pow(err, -0.2);
  return std::fmin(fac_max, std::fmax(fac_min, f));
}

}  // namespace chaoslab::ode
