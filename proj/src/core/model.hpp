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

// Physical parameters, squeezed-frame quantities and every Hamiltonian of the
// driven Jaynes-Cummings / effective Rabi mapping. Frequencies are in units of
// the cavity detuning delta_c = 1; times in units of 1 / delta_c.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/quantum_core.hpp"

namespace chaoslab {

struct SystemParams {
  static constexpr double delta_c = 1.0;

  double delta_a = 0.0;  ///< qubit detuning omega_a - omega_p / 2
  double g = 0.0;        ///< bare coupling
  double r = 0.0;        ///< squeezing parameter, tanh 2r = lambda / delta_c
  double omega_p = 0.0;  ///< two-photon drive frequency (lab frame only)

  /// Throws PreconditionError for g < 0, r < 0 or non-finite values.
  static SystemParams from_squeezing(double delta_a, double g, double r, double omega_p = 0.0);
  /// r = atanh(lambda / delta_c) / 2; requires 0 <= lambda < delta_c.
  static SystemParams from_drive(double delta_a, double g, double lambda, double omega_p = 0.0);

  double lambda() const;
  double omega_a() const { return delta_a + 0.5 * omega_p; }
  double omega_c() const { return delta_c + 0.5 * omega_p; }

  void validate() const;
};

enum class Phase { normal, superradiant };
const char* to_string(Phase p);

struct DerivedParams {
  double g_tilde = 0.0;      ///< g e^r / 2
  double omega_c_eff = 0.0;  ///< delta_c sech 2r
  double eta = 0.0;          ///< (delta_a / delta_c) cosh 2r
  double g_crit = 0.0;       ///< sqrt(delta_a Omega_c) / 2
  Phase phase = Phase::normal;
  bool eta_semiclassical = false;  ///< eta > 18
};

DerivedParams derive_params(const SystemParams& p);

/// (delta_a/2) sz + Omega_c a^dag a + g~ (a^dag + a)(s+ + s-)
OperatorMatrix build_H_rabi(const SystemParams& p, const FockTruncation& trunc);
/// -(g/2) e^{-r} (a^dag - a)(s+ - s-)
OperatorMatrix build_H_err(const SystemParams& p, const FockTruncation& trunc);
/// H_rabi + H_err, scaled error term when err_scale != 1.
OperatorMatrix build_H_eff(const SystemParams& p, const FockTruncation& trunc, double err_scale = 1.0);
/// Rotating frame at omega_p / 2:
/// (delta_a/2) sz + delta_c a^dag a + g (a^dag s- + a s+) - (lambda/2)(a^dag^2 + a^2)
OperatorMatrix build_H_rotated(const SystemParams& p, const FockTruncation& trunc);
/// Lab frame at time t, drive phases exp(-/+ i omega_p t).
OperatorMatrix build_H_lab(const SystemParams& p, double t, const FockTruncation& trunc);

/// Lab Hamiltonian split as H0 + e^{-i omega_p t} D + e^{+i omega_p t} D^dag
/// so time-dependent propagation does not rebuild operator products per stage.
class LabHamiltonian {
 public:
  LabHamiltonian(const SystemParams& p, const FockTruncation& trunc);
  OperatorMatrix at(double t) const;
  /// out = H(t) psi without assembling H(t).
  void apply(double t, const ComplexVector& psi, ComplexVector& out) const;
  /// Row-sum bound on ||H(t)|| valid for every t.
  double norm_bound() const;

 private:
  double omega_p_;
  Eigen::Index cavity_dim_;
  SparseOperator static_part_, drive_, drive_adjoint_;
  // banded coefficients used by apply()
  Eigen::VectorXd diagonal_;  ///< static diagonal per flat index
  Eigen::VectorXd exchange_;  ///< g sqrt(n+1): |G,n+1> <-> |E,n>
  Eigen::VectorXd pair_;      ///< -(lambda/2) sqrt(n(n-1)): |n> <- |n-2>
};

/// Probability mass of the squeezed vacuum S(r)|0> in Fock states n > n_cut.
double squeezed_vacuum_tail(double r, int n_cut);

/// Margin of extra photons used when exponentiating the squeeze generator.
inline constexpr int kSqueezeMargin = 20;

/// U_S(r) = exp[r (a^2 - a^dag^2) / 2] on the full space (qubit identity (x)
/// cavity part). Exponentiated on n_max + kSqueezeMargin and projected back.
/// Throws PreconditionError when the squeezed-vacuum tail above
/// n_max - kSqueezeMargin exceeds 1e-6.
OperatorMatrix squeeze_unitary(double r, const FockTruncation& trunc);

/// Applies U_S(r) (or its adjoint when adjoint = true) to a state. Works on an
/// enlarged cavity space of n_max + margin photons and throws PreconditionError
/// if the image carries more than `edge_limit` probability above
/// n_max - kSqueezeMargin (margin included). The measured edge mass is stored
/// in `edge_mass` when non-null.
KetState apply_squeeze(double r, const KetState& psi, const FockTruncation& trunc, bool adjoint = false,
                       int margin = 200, double edge_limit = 1e-6, double* edge_mass = nullptr);

/// U_R(t) = exp[i (omega_p / 2)(a^dag a + sz / 2) t], diagonal.
OperatorMatrix rotation_unitary(const SystemParams& p, double t, const FockTruncation& trunc);

/// Squeezed vacuum exp(i angle a^dag a) S(r_s)|0> for the cavity (exact Fock
/// amplitudes).
KetState squeezed_vacuum(double r_s, const FockTruncation& trunc, double angle = 0.0);

struct FrameCheckOptions {
  /// Global state-distance tolerance of each propagation. The overlap error
  /// is quadratic in it.
  double tolerance = 1e-4;
  /// Edge mass accepted when mapping between frames. Truncation loses about
  /// this much overlap, so it must stay well below the overlap budget.
  double edge_mass_limit = 1e-4;
};

struct FrameCheckResult {
  std::vector<double> times;
  std::vector<double> overlaps;
  double min_overlap = 1.0;
  double lab_norm_drift = 0.0;
  double max_edge_mass = 0.0;  ///< largest edge mass seen while mapping frames
  long integrator_steps = 0;
};

/// Propagates U_S^dag psi0 under the time-dependent lab Hamiltonian and psi0
/// under static H_eff, and reports |<psi_lab(t)| U_R^dag(t) U_S^dag |psi_S(t)>|^2
/// at `steps` + 1 uniform sample times in [0, T].
FrameCheckResult verify_frame_equivalence(const SystemParams& p, const KetState& psi0_squeezed, double T, int steps,
                                          const FockTruncation& trunc, const FrameCheckOptions& opts = {});

}  // namespace chaoslab
