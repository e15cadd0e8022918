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

// Quantum chaos indicators computed in the squeezed-light frame.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/propagation.hpp"
#include "core/quantum_core.hpp"

namespace chaoslab {

struct TimeSeries {
  std::vector<double> times;  ///< strictly increasing (units 1 / delta_c)
  std::vector<double> values;
  std::string label;

  /// Throws InvalidArgument unless lengths match and times strictly increase.
  void validate() const;
  std::size_t size() const { return times.size(); }
};

/// |<a|b>|^2.
double fidelity(const KetState& a, const KetState& b);

/// Trapezoidal mean of a series over its own time span.
double time_average(const TimeSeries& s);

/// L(t) = |<psi0| e^{iHt} e^{-i(H + H_per)t} |psi0>|^2, evaluated as the
/// fidelity between the two forward evolutions.
TimeSeries loschmidt_echo(const SpectralPropagator& unperturbed, const SpectralPropagator& perturbed,
                          const KetState& psi0, std::span<const double> times);
/// H = H_rabi, H + H_per = H_rabi + err_scale * H_err.
TimeSeries loschmidt_echo(const SystemParams& p, const FockTruncation& trunc, const KetState& psi0,
                          std::span<const double> times, double err_scale = 1.0);

inline constexpr int kScanEdgeLevels = 10;
inline constexpr double kScanEdgeLimit = 1e-8;

/// L(T) for each r, rebuilding both Hamiltonians at that r from the same
/// coherent labels. The returned `times` field holds the r values. Throws
/// PreconditionError when either evolved state holds more than kScanEdgeLimit
/// of its population in the top kScanEdgeLevels Fock levels.
TimeSeries fidelity_vs_r_scan(const SystemParams& base, const CoherentLabels& labels, double T,
                              std::span<const double> r_values, const FockTruncation& trunc, int threads = 1);

/// G = (a + a^dag) / 2 on the full space.
OperatorMatrix quadrature_G(const FockTruncation& trunc);

/// var[O(t)] in the state e^{-iHt} psi0 (Heisenberg expectation moved to the
/// Schroedinger picture). `observable` defaults to G.
TimeSeries otoc_variance(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times,
                         const FockTruncation& trunc, const std::optional<OperatorMatrix>& observable = std::nullopt);

struct OtocConfig {
  double epsilon = 1e-3;
  std::vector<double> times;
  /// Warning raised when epsilon^2 * max var exceeds this bound.
  double small_parameter_limit = 0.1;
};

struct OtocDirectResult {
  TimeSeries f;
  bool small_parameter_warning = false;
};

/// F(t) = <phi| W^dag(t) V^dag W(t) V |phi> with W = exp(i eps G), V = |phi><phi|.
/// Because V is the projector on phi,
///   F(t) = <phi|W^dag(t)|phi> <phi|W(t)|phi> = |<phi(t)| e^{i eps G} |phi(t)>|^2
/// with |phi(t)> = e^{-iHt}|phi>, so only the forward-evolved state is needed.
OtocDirectResult otoc_direct(const SpectralPropagator& H, const KetState& phi, const OtocConfig& cfg,
                             const FockTruncation& trunc);

struct ScramblingTime {
  double t_star = 0.0;
  std::size_t index = 0;
  bool at_horizon = false;  ///< maximum at the last sample: horizon too short
};

/// Earliest sample attaining the global maximum (relative tolerance 1e-9).
ScramblingTime scrambling_time(const TimeSeries& series);

struct LyapunovFit {
  double lambda_q = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  bool reliable = false;  ///< r_squared >= 0.9
};

/// Least-squares slope of ln(values) against t over [t_lo, t_hi].
LyapunovFit lyapunov_fit(const TimeSeries& series, double t_lo, double t_hi);

/// Default fit window [0.05 t*, 0.8 t*].
std::pair<double, double> default_fit_window(double t_star);

/// S = 1 - Tr[rho_1^2] with rho_1 the qubit reduced state.
double linear_entropy(const DensityMatrix& rho_full, const FockTruncation& trunc);
double linear_entropy(const KetState& psi, const FockTruncation& trunc);

enum class HamiltonianChoice { eff, rabi };

TimeSeries entropy_series(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times,
                          const FockTruncation& trunc);
TimeSeries entropy_series(const SystemParams& p, const FockTruncation& trunc, const KetState& psi0,
                          std::span<const double> times, HamiltonianChoice choice, double err_scale = 1.0);

/// (1/T) * trapezoid of S over [0, T]. Throws InvalidArgument when the series
/// does not cover [0, T].
double average_entropy(const TimeSeries& series, double T);

struct AveragedEntropy {
  double value = 0.0;
  std::size_t samples = 0;
  double last_change = 0.0;  ///< relative change of the final doubling
  bool converged = false;
};

/// Time-averaged entropy on uniform grids over [0, T], doubling the density
/// from `initial_samples` until successive averages agree to rel_tol.
AveragedEntropy time_averaged_entropy(const SpectralPropagator& H, const KetState& psi0, double T,
                                      const FockTruncation& trunc, std::size_t initial_samples = 2000,
                                      double rel_tol = 1e-4, std::size_t max_samples = 1 << 17);

struct EntropyMapSpec {
  double q1_min = -1.5, q1_max = 1.5, p1_min = -1.5, p1_max = 1.5;
  int q1_points = 61, p1_points = 61;
  double energy = 0.0;
  double T = 0.0;
  std::size_t initial_samples = 2000;
  double rel_tol = 1e-4;
  std::size_t max_samples = 1 << 16;
  int threads = 1;
};

struct EntropyMap {
  std::vector<double> q1_axis, p1_axis;
  Eigen::MatrixXd values;      ///< rows follow q1, cols p1; NaN where masked
  Eigen::MatrixXd p2;          ///< on-shell p2 per cell, NaN where masked
  std::vector<std::uint8_t> masked;  ///< row-major q1 x p1
  std::size_t unconverged = 0;
  bool is_masked(int i, int j) const { return masked[static_cast<std::size_t>(i) * p1_axis.size() + j] != 0; }
};

/// Time-averaged entropy under H_eff for product states placed on the energy
/// shell (q2 = 0, p2 > 0 from the classical Hamiltonian). Cells outside the
/// Bloch disk or without a real positive p2 are masked.
EntropyMap entropy_map(const SystemParams& p, const FockTruncation& trunc, const EntropyMapSpec& spec);

/// P(t) = |<psi0|psi(t)>|^2.
TimeSeries recurrence(const SpectralPropagator& H, const KetState& psi0, std::span<const double> times);

/// Largest P(t) after the first collapse (first sample with P below
/// `collapse_level`); 0 if P never collapses.
double revival_amplitude(const TimeSeries& recurrence_series, double collapse_level = 0.5);

struct HusimiGridSpec {
  double re_min = -5.0, re_max = 5.0, im_min = -5.0, im_max = 5.0;
  int re_points = 201, im_points = 201;
};

struct HusimiGrid {
  std::vector<double> re_beta_axis, im_beta_axis;
  Eigen::MatrixXd q_values;  ///< rows follow Re beta, cols Im beta
  double snapshot_time = 0.0;

  double cell_area() const;
  /// beta at grid node (i, j).
  Complex grid_point(Eigen::Index i, Eigen::Index j) const {
    return {re_beta_axis[static_cast<std::size_t>(i)], im_beta_axis[static_cast<std::size_t>(j)]};
  }
  /// Riemann sum of Q dA.
  double normalization() const;
  /// Mean of beta under Q.
  Complex mean() const;
  /// Second moment of |beta - mean|^2 under Q.
  double spread() const;
};

/// Square grid covering |beta| <= 1.5 * sqrt(n_support), where n_support is the
/// photon number holding all but 1e-6 of the cavity population.
HusimiGridSpec default_husimi_grid(const KetState& psi, const FockTruncation& trunc, int points = 201);

/// Q(beta) = <beta| rho_2 |beta> / pi from a pure full-space state.
HusimiGrid husimi(const KetState& psi, const FockTruncation& trunc, const HusimiGridSpec& grid, double time = 0.0);
/// Same from an explicit cavity density matrix.
HusimiGrid husimi(const DensityMatrix& rho_cavity, const HusimiGridSpec& grid, double time = 0.0);
/// Evolves psi0 under H to time t first.
HusimiGrid husimi_snapshot(const SpectralPropagator& H, const KetState& psi0, double t, const FockTruncation& trunc,
                           const HusimiGridSpec& grid);

/// Truncated coherent-state vector <n|beta>, n = 0..cavity_dim-1, computed in
/// log space (no overflow for large |beta|).
ComplexVector coherent_vector(Complex beta, Eigen::Index cavity_dim);

}  // namespace chaoslab
