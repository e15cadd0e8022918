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

// Scenario runner: JSON configuration, named presets, dispatch to the physics
// modules, CSV + JSON metadata output and truncation convergence reports.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/diagnostics.hpp"
#include "core/model.hpp"
#include "core/quantum_core.hpp"

namespace chaoslab {

enum class Scenario {
  poincare,
  loschmidt,
  fidelity_scan,
  otoc,
  otoc_direct,
  entropy,
  entropy_map,
  recurrence,
  husimi,
  frame_check,
};

const char* to_string(Scenario s);

/// Named parameter set with its shell energy.
struct ParameterPreset {
  std::string name;
  double delta_a, g, r, energy;
  std::string source;
};

/// Named initial state (tau, beta) belonging to a parameter set.
struct StatePreset {
  std::string name;
  Complex tau, beta;
  std::string parameter_set;  ///< empty when valid for any set
  std::string source;
};

const std::vector<ParameterPreset>& parameter_presets();
const std::vector<StatePreset>& state_presets();
nlohmann::json presets_json();

struct InitialSpec {
  enum class Kind { labels, phase } kind = Kind::labels;
  std::string preset;  ///< name when expanded from a preset
  CoherentLabels labels{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  PhasePoint point;
};

struct Tolerances {
  double integrator = 1e-4;     ///< time-dependent propagation (frame check)
  double classical = 1e-12;     ///< classical per-step tolerance
  double energy_drift = 1e-8;   ///< classical energy-drift limit
  double entropy_rel = 1e-4;    ///< adaptive time-average convergence
  std::size_t max_samples = 1 << 16;
  double convergence = 1e-4;    ///< n_max -> 1.5 n_max relative change limit
  double frame_overlap = 0.999; ///< minimum accepted frame-check overlap
};

struct ScenarioConfig {
  Scenario scenario = Scenario::otoc;
  std::string name;            ///< output file stem
  std::string parameter_set;   ///< "a", "b" or empty for explicit parameters
  SystemParams params;
  std::optional<double> energy;  ///< shell energy (poincare, entropy_map)
  InitialSpec initial;
  double horizon = 0.0;
  std::size_t samples = 2000;
  int n_max = 200;
  Tolerances tol;
  std::filesystem::path output_dir = ".";
  int threads = 1;  ///< config default: available cores
  bool convergence = true;

  // poincare
  std::size_t crossings = 1000;
  bool default_seeds = false;
  // loschmidt, entropy
  double err_scale = 1.0;
  HamiltonianChoice hamiltonian = HamiltonianChoice::eff;
  // fidelity_scan
  std::vector<double> r_values;
  // otoc, otoc_direct
  double epsilon = 1e-3;
  std::optional<std::pair<double, double>> fit_window;
  // entropy_map
  EntropyMapSpec map;
  // husimi
  std::optional<double> snapshot_time;
  int husimi_points = 201;
  std::optional<double> husimi_radius;
  // frame_check
  /// r_s of |G> (x) exp(i Omega_c T/2 a^dag a) S(r_s)|0>, a squeezed vacuum
  /// whose squeezing axis lines up at mid-horizon. Without it and without
  /// `initial` the r_s keeping the lab-frame image most compact is used.
  std::optional<double> squeezed_initial;
  int frame_steps = 10;

  nlohmann::json resolved;  ///< normalized echo of the configuration
};

/// Parses and validates a configuration; throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Headline scalar of a scenario (the quantity compared by convergence reports).
struct Headline {
  std::string name;
  double value = 0.0;
  bool applicable = true;
};

struct ConvergenceReport {
  std::string headline;
  int n_max = 0, n_max_refined = 0;
  double value = 0.0, value_refined = 0.0;
  double relative_change = 0.0;
  bool applicable = true;
  bool warning = false;  ///< relative change above the configured limit
};

nlohmann::json to_json(const ConvergenceReport& r);

/// Headline of the scenario evaluated at truncation n_max.
Headline headline(const ScenarioConfig& cfg, int n_max);
/// Headline at n_max and at round(1.5 n_max).
ConvergenceReport convergence_report(const ScenarioConfig& cfg);

struct RunOutcome {
  std::filesystem::path csv_path, metadata_path;
  nlohmann::json metadata;
};

/// Runs the scenario and writes <name>.csv and <name>.meta.json into output_dir.
/// Outputs appear only after the computation succeeded.
RunOutcome run_scenario(const ScenarioConfig& cfg);

}  // namespace chaoslab
