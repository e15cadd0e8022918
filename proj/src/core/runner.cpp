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

#include "core/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/propagation.hpp"
#include "core/semiclassical.hpp"

namespace chaoslab {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError("config: " + msg); }

double number(const json& j, const std::string& key) {
  if (!j.contains(key)) config_error("missing field '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) config_error("field '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error("field '" + key + "' must be finite");
  return d;
}

double number_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

long integer(const json& j, const std::string& key, long fallback, long min_value) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) config_error("field '" + key + "' must be an integer");
  const long n = v.get<long>();
  if (n < min_value) config_error("field '" + key + "' must be >= " + std::to_string(min_value));
  return n;
}

std::string text(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_string()) config_error("field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Complex complex_value(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object() && v.contains("re") && v.contains("im")) return {number(v, "re"), number(v, "im")};
  config_error("field '" + key + "' must be a number, [re, im] or {\"re\", \"im\"}");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) config_error("unknown field '" + it.key() + "' in " + where);
}

std::pair<double, double> number_pair(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_error("field '" + key + "' must be a two-element numeric array");
  return {v[0].get<double>(), v[1].get<double>()};
}

Scenario scenario_from(const std::string& s) {
  static const std::pair<const char*, Scenario> names[] = {
      {"poincare", Scenario::poincare},       {"loschmidt", Scenario::loschmidt},
      {"fidelity_scan", Scenario::fidelity_scan}, {"otoc", Scenario::otoc},
      {"otoc_direct", Scenario::otoc_direct}, {"entropy", Scenario::entropy},
      {"entropy_map", Scenario::entropy_map}, {"recurrence", Scenario::recurrence},
      {"husimi", Scenario::husimi},           {"frame_check", Scenario::frame_check},
  };
  for (const auto& [n, sc] : names)
    if (s == n) return sc;
  config_error("unknown scenario '" + s + "'");
}

const ParameterPreset* find_parameter_preset(const std::string& name) {
  for (const auto& p : parameter_presets())
    if (p.name == name) return &p;
  return nullptr;
}

const StatePreset* find_state_preset(const std::string& name) {
  for (const auto& p : state_presets())
    if (p.name == name) return &p;
  return nullptr;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json derived_json(const SystemParams& p) {
  const DerivedParams d = derive_params(p);
  return {{"g_tilde", d.g_tilde},     {"omega_c_eff", d.omega_c_eff},
          {"eta", d.eta},             {"g_crit", d.g_crit},
          {"phase", to_string(d.phase)}, {"eta_semiclassical", d.eta_semiclassical},
          {"lambda", p.lambda()}};
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::poincare: return "poincare";
    case Scenario::loschmidt: return "loschmidt";
    case Scenario::fidelity_scan: return "fidelity_scan";
    case Scenario::otoc: return "otoc";
    case Scenario::otoc_direct: return "otoc_direct";
    case Scenario::entropy: return "entropy";
    case Scenario::entropy_map: return "entropy_map";
    case Scenario::recurrence: return "recurrence";
    case Scenario::husimi: return "husimi";
    case Scenario::frame_check: return "frame_check";
  }
  return "unknown";
}

const std::vector<ParameterPreset>& parameter_presets() {
  static const std::vector<ParameterPreset> presets = {
      {"a", 0.02, 2e-4, 4.0, 0.018, "set (a): delta_a = 0.02, g = 2e-4, r = 4, E = 0.018"},
      {"b", 0.75, 0.0375, 2.0, 0.75, "set (b): delta_a = 0.75, g = 0.0375, r = 2, E = 0.75"},
  };
  return presets;
}

const std::vector<StatePreset>& state_presets() {
  static const std::vector<StatePreset> presets = {
      {"C1", {0.825, 0.0}, {0.0, 5.4461}, "a", "set (a), chaotic point"},
      {"R1", {7.0, 0.0}, {0.0, 3.5384}, "a", "set (a), regular point"},
      {"C2", {0.0999, 0.4081}, {0.0, 5.3065}, "b", "set (b), chaotic point"},
      {"R2", {-0.9419, 1.4653}, {0.0, 3.9644}, "b", "set (b), regular point"},
      {"plus_vac", {1.0, 0.0}, {0.0, 0.0}, "", "OTOC initial state |+> (x) |0>"},
  };
  return presets;
}

json presets_json() {
  json out;
  out["units"] = "frequencies in delta_c, times in 1/delta_c";
  for (const auto& p : parameter_presets())
    out["parameter_sets"].push_back({{"name", p.name},
                                     {"delta_a", p.delta_a},
                                     {"g", p.g},
                                     {"r", p.r},
                                     {"energy", p.energy},
                                     {"source", p.source}});
  for (const auto& s : state_presets()) {
    json e = {{"name", s.name}, {"tau", complex_json(s.tau)}, {"beta", complex_json(s.beta)}, {"source", s.source}};
    e["parameter_set"] = s.parameter_set.empty() ? json(nullptr) : json(s.parameter_set);
    out["initial_states"].push_back(e);
  }
  return out;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) config_error("top level must be an object");
  reject_unknown(j,
                 {"scenario", "name", "params", "initial", "energy", "horizon", "samples", "n_max", "tolerances",
                  "output_dir", "threads", "convergence", "crossings", "seeds", "err_scale", "hamiltonian",
                  "r_values", "epsilon", "fit_window", "grid", "snapshot_time", "husimi_points", "husimi_radius",
                  "squeezed_initial", "frame_steps"},
                 "configuration");
  ScenarioConfig c;
  c.scenario = scenario_from(text(j, "scenario"));
  c.name = j.contains("name") ? text(j, "name") : std::string(to_string(c.scenario));
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
    config_error("'name' must be a plain file stem");

  // parameters
  if (!j.contains("params") || !j.at("params").is_object()) config_error("'params' object is required");
  const json& pj = j.at("params");
  reject_unknown(pj, {"set", "delta_a", "g", "r", "lambda", "omega_p"}, "params");
  double delta_a = 0.0, g = 0.0, r = 0.0;
  const ParameterPreset* set = nullptr;
  if (pj.contains("set")) {
    c.parameter_set = text(pj, "set");
    set = find_parameter_preset(c.parameter_set);
    if (!set) config_error("unknown parameter set '" + c.parameter_set + "'");
    delta_a = set->delta_a;
    g = set->g;
    r = set->r;
  } else if (!pj.contains("delta_a") || !pj.contains("g") || !(pj.contains("r") || pj.contains("lambda"))) {
    config_error("params need 'set' or all of delta_a, g and r (or lambda)");
  }
  delta_a = number_or(pj, "delta_a", delta_a);
  g = number_or(pj, "g", g);
  if (pj.contains("r") && pj.contains("lambda")) config_error("give exactly one of 'r' and 'lambda'");
  const double omega_p = number_or(pj, "omega_p", c.scenario == Scenario::frame_check ? 1.0 : 0.0);
  try {
    c.params = pj.contains("lambda") ? SystemParams::from_drive(delta_a, g, number(pj, "lambda"), omega_p)
                                     : SystemParams::from_squeezing(delta_a, g, number_or(pj, "r", r), omega_p);
  } catch (const Error& e) {
    config_error(std::string("invalid parameters: ") + e.what());
  }
  if (j.contains("energy")) c.energy = number(j, "energy");
  else if (set) c.energy = set->energy;

  // initial state
  if (j.contains("initial")) {
    const json& ij = j.at("initial");
    if (ij.is_string()) {
      const std::string name = ij.get<std::string>();
      const StatePreset* sp = find_state_preset(name);
      if (!sp) config_error("unknown initial preset '" + name + "'");
      if (!sp->parameter_set.empty() && !c.parameter_set.empty() && sp->parameter_set != c.parameter_set)
        config_error("initial preset '" + name + "' belongs to parameter set '" + sp->parameter_set + "'");
      c.initial.preset = name;
      c.initial.labels = {sp->tau, sp->beta};
    } else if (ij.is_object() && ij.contains("tau")) {
      reject_unknown(ij, {"tau", "beta"}, "initial");
      c.initial.labels = {complex_value(ij.at("tau"), "tau"), ij.contains("beta") ? complex_value(ij.at("beta"), "beta")
                                                                                  : Complex(0.0, 0.0)};
    } else if (ij.is_object() && ij.contains("q1")) {
      reject_unknown(ij, {"q1", "p1", "q2", "p2"}, "initial");
      c.initial.kind = InitialSpec::Kind::phase;
      c.initial.point = {number(ij, "q1"), number(ij, "p1"), number_or(ij, "q2", 0.0), number(ij, "p2")};
      if (!(c.initial.point.bloch_radius_sq() < 2.0)) config_error("initial phase point outside the Bloch disk");
      c.initial.labels = phase_to_labels(c.initial.point);
    } else {
      config_error("'initial' must be a preset name, {tau, beta} or {q1, p1, q2, p2}");
    }
  } else if (c.scenario == Scenario::otoc || c.scenario == Scenario::otoc_direct) {
    c.initial.preset = "plus_vac";
  } else if (c.scenario != Scenario::entropy_map && c.scenario != Scenario::frame_check &&
             !(c.scenario == Scenario::poincare && j.value("seeds", std::string()) == "default")) {
    config_error("'initial' is required for scenario " + std::string(to_string(c.scenario)));
  }
  if (c.initial.kind == InitialSpec::Kind::labels)
    c.initial.point = labels_to_phase(c.initial.labels.tau, c.initial.labels.beta);

  // sampling, truncation, execution
  const bool needs_horizon = c.scenario != Scenario::poincare && c.scenario != Scenario::frame_check;
  if (j.contains("horizon")) c.horizon = number(j, "horizon");
  else if (needs_horizon) config_error("'horizon' is required");
  else c.horizon = c.scenario == Scenario::poincare ? 1e9 : 100.0;
  if (!(c.horizon > 0.0)) config_error("'horizon' must be > 0");
  c.samples = static_cast<std::size_t>(integer(j, "samples", 2000, 2));
  c.n_max = static_cast<int>(integer(j, "n_max", 200, 1));
  c.threads = static_cast<int>(integer(j, "threads", default_threads(), 1));
  if (j.contains("output_dir")) c.output_dir = text(j, "output_dir");
  if (j.contains("convergence")) {
    if (!j.at("convergence").is_boolean()) config_error("'convergence' must be a boolean");
    c.convergence = j.at("convergence").get<bool>();
  }
  if (j.contains("tolerances")) {
    const json& tj = j.at("tolerances");
    if (!tj.is_object()) config_error("'tolerances' must be an object");
    reject_unknown(tj,
                   {"integrator", "classical", "energy_drift", "entropy_rel", "max_samples", "convergence",
                    "frame_overlap"},
                   "tolerances");
    c.tol.integrator = number_or(tj, "integrator", c.tol.integrator);
    c.tol.classical = number_or(tj, "classical", c.tol.classical);
    c.tol.energy_drift = number_or(tj, "energy_drift", c.tol.energy_drift);
    c.tol.entropy_rel = number_or(tj, "entropy_rel", c.tol.entropy_rel);
    c.tol.max_samples = static_cast<std::size_t>(integer(tj, "max_samples", static_cast<long>(c.tol.max_samples), 2));
    c.tol.convergence = number_or(tj, "convergence", c.tol.convergence);
    c.tol.frame_overlap = number_or(tj, "frame_overlap", c.tol.frame_overlap);
    for (double v : {c.tol.integrator, c.tol.classical, c.tol.energy_drift, c.tol.entropy_rel, c.tol.convergence})
      if (!(v > 0.0)) config_error("tolerances must be > 0");
  }

  // scenario-specific fields
  c.crossings = static_cast<std::size_t>(integer(j, "crossings", 1000, 1));
  if (j.contains("seeds")) {
    if (text(j, "seeds") == "default") c.default_seeds = true;
    else if (text(j, "seeds") != "initial") config_error("'seeds' must be \"initial\" or \"default\"");
  }
  c.err_scale = number_or(j, "err_scale", 1.0);
  if (j.contains("hamiltonian")) {
    const std::string h = text(j, "hamiltonian");
    if (h == "eff") c.hamiltonian = HamiltonianChoice::eff;
    else if (h == "rabi") c.hamiltonian = HamiltonianChoice::rabi;
    else config_error("'hamiltonian' must be \"eff\" or \"rabi\"");
  }
  if (j.contains("r_values")) {
    const json& rv = j.at("r_values");
    if (rv.is_array()) {
      for (const auto& v : rv) {
        if (!v.is_number()) config_error("'r_values' entries must be numbers");
        c.r_values.push_back(v.get<double>());
      }
    } else if (rv.is_object()) {
      reject_unknown(rv, {"min", "max", "count"}, "r_values");
      const double lo = number(rv, "min"), hi = number(rv, "max");
      const long count = integer(rv, "count", 2, 1);
      for (long i = 0; i < count; ++i) c.r_values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    } else {
      config_error("'r_values' must be an array or {min, max, count}");
    }
    for (std::size_t i = 0; i < c.r_values.size(); ++i) {
      if (!(c.r_values[i] >= 0.0)) config_error("'r_values' must be >= 0");
      if (i && !(c.r_values[i] > c.r_values[i - 1])) config_error("'r_values' must be strictly increasing");
    }
  }
  if (c.scenario == Scenario::fidelity_scan && c.r_values.empty()) config_error("'r_values' is required");
  c.epsilon = number_or(j, "epsilon", 1e-3);
  if (!(c.epsilon > 0.0)) config_error("'epsilon' must be > 0");
  if (j.contains("fit_window")) {
    c.fit_window = number_pair(j, "fit_window");
    if (!(c.fit_window->first < c.fit_window->second)) config_error("'fit_window' must satisfy lo < hi");
  }
  if (j.contains("grid")) {
    const json& gj = j.at("grid");
    if (!gj.is_object()) config_error("'grid' must be an object");
    reject_unknown(gj, {"q1", "p1", "points"}, "grid");
    if (gj.contains("q1")) std::tie(c.map.q1_min, c.map.q1_max) = number_pair(gj, "q1");
    if (gj.contains("p1")) std::tie(c.map.p1_min, c.map.p1_max) = number_pair(gj, "p1");
    if (gj.contains("points")) {
      const auto [nq, np] = number_pair(gj, "points");
      c.map.q1_points = static_cast<int>(nq);
      c.map.p1_points = static_cast<int>(np);
    }
    if (c.map.q1_points < 1 || c.map.p1_points < 1) config_error("grid points must be >= 1");
  }
  if (c.scenario == Scenario::entropy_map) {
    if (!c.energy) config_error("entropy_map needs 'energy' or a parameter set");
    c.map.energy = *c.energy;
    c.map.T = c.horizon;
    c.map.initial_samples = c.samples;
    c.map.rel_tol = c.tol.entropy_rel;
    c.map.max_samples = c.tol.max_samples;
    c.map.threads = c.threads;
  }
  if (j.contains("snapshot_time")) c.snapshot_time = number(j, "snapshot_time");
  c.husimi_points = static_cast<int>(integer(j, "husimi_points", 201, 2));
  if (j.contains("husimi_radius")) {
    c.husimi_radius = number(j, "husimi_radius");
    if (!(*c.husimi_radius > 0.0)) config_error("'husimi_radius' must be > 0");
  }
  if (j.contains("squeezed_initial")) {
    if (j.contains("initial")) config_error("give either 'initial' or 'squeezed_initial'");
    c.squeezed_initial = number(j, "squeezed_initial");
    if (!(*c.squeezed_initial >= 0.0)) config_error("'squeezed_initial' must be >= 0");
  } else if (c.scenario == Scenario::frame_check && !j.contains("initial")) {
    // lab photon number ~ e^{2r} (e^{-2 r_s} + e^{2 r_s} (Omega_c (t - T/2))^2) / 4,
    // largest at both ends and minimized there by this r_s
    const double theta = derive_params(c.params).omega_c_eff * c.horizon;
    c.squeezed_initial = std::max(0.0, 0.5 * std::log(2.0 / theta));
  }
  c.frame_steps = static_cast<int>(integer(j, "frame_steps", 10, 1));

  // normalized echo
  json& e = c.resolved;
  e["scenario"] = to_string(c.scenario);
  e["name"] = c.name;
  e["params"] = {{"set", c.parameter_set.empty() ? json(nullptr) : json(c.parameter_set)},
                 {"delta_a", c.params.delta_a},
                 {"delta_c", SystemParams::delta_c},
                 {"g", c.params.g},
                 {"r", c.params.r},
                 {"lambda", c.params.lambda()},
                 {"omega_p", c.params.omega_p}};
  e["energy"] = c.energy ? json(*c.energy) : json(nullptr);
  e["initial"] = {{"preset", c.initial.preset.empty() ? json(nullptr) : json(c.initial.preset)},
                  {"tau", complex_json(c.initial.labels.tau)},
                  {"beta", complex_json(c.initial.labels.beta)},
                  {"phase_point", {c.initial.point.q1, c.initial.point.p1, c.initial.point.q2, c.initial.point.p2}}};
  e["horizon"] = c.horizon;
  e["samples"] = c.samples;
  e["n_max"] = c.n_max;
  e["threads"] = c.threads;
  e["output_dir"] = c.output_dir.string();
  e["convergence"] = c.convergence;
  e["tolerances"] = {{"integrator", c.tol.integrator},   {"classical", c.tol.classical},
                     {"energy_drift", c.tol.energy_drift}, {"entropy_rel", c.tol.entropy_rel},
                     {"max_samples", c.tol.max_samples}, {"convergence", c.tol.convergence},
                     {"frame_overlap", c.tol.frame_overlap}};
  switch (c.scenario) {
    case Scenario::poincare:
      e["crossings"] = c.crossings;
      e["seeds"] = c.default_seeds ? "default" : "initial";
      break;
    case Scenario::loschmidt: e["err_scale"] = c.err_scale; break;
    case Scenario::fidelity_scan: e["r_values"] = c.r_values; break;
    case Scenario::otoc:
    case Scenario::otoc_direct:
      e["epsilon"] = c.epsilon;
      e["fit_window"] = c.fit_window ? json::array({c.fit_window->first, c.fit_window->second}) : json(nullptr);
      break;
    case Scenario::entropy:
      e["hamiltonian"] = c.hamiltonian == HamiltonianChoice::eff ? "eff" : "rabi";
      e["err_scale"] = c.err_scale;
      break;
    case Scenario::entropy_map:
      e["grid"] = {{"q1", {c.map.q1_min, c.map.q1_max}},
                   {"p1", {c.map.p1_min, c.map.p1_max}},
                   {"points", {c.map.q1_points, c.map.p1_points}}};
      break;
    case Scenario::husimi:
      e["snapshot_time"] = c.snapshot_time ? *c.snapshot_time : c.horizon;
      e["husimi_points"] = c.husimi_points;
      e["husimi_radius"] = c.husimi_radius ? json(*c.husimi_radius) : json(nullptr);
      break;
    case Scenario::frame_check:
      e["squeezed_initial"] = c.squeezed_initial ? json(*c.squeezed_initial) : json(nullptr);
      e["frame_steps"] = c.frame_steps;
      break;
    case Scenario::recurrence: break;
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(j);
}

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
  Table table;
  json results;
  Headline head;
  std::vector<std::string> violations;
};

std::string lineage(const ScenarioConfig& c) {
  const std::string panel = c.parameter_set == "b" ? "b" : "a";
  switch (c.scenario) {
    case Scenario::poincare: return "fig1" + panel;
    case Scenario::loschmidt: return c.parameter_set == "b" ? "fig2c" : "fig2a";
    case Scenario::fidelity_scan: return c.parameter_set == "b" ? "fig2d" : "fig2b";
    case Scenario::otoc:
    case Scenario::otoc_direct: return "fig4" + panel;
    case Scenario::entropy:
      if (c.parameter_set == "b") return c.hamiltonian == HamiltonianChoice::eff ? "fig5a" : "fig5b";
      return c.params.r < 2.0 ? "fig5d" : "fig5c";
    case Scenario::recurrence: return "fig6";
    case Scenario::entropy_map: return "fig7";
    case Scenario::husimi: return "fig8";
    case Scenario::frame_check: return "frame-equivalence";
  }
  return "";
}

KetState initial_state(const ScenarioConfig& c, const FockTruncation& trunc) {
  const CoherentLabels& l = c.initial.labels;
  return product_state(l.tau, l.beta, trunc);
}

double max_relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

json curve_json(const CurveStatistic& st) {
  return {{"max_gap", st.max_gap},       {"median_gap", st.median_gap}, {"gap_ratio", st.gap_ratio},
          {"tour_ratio", st.tour_ratio}, {"closed", st.closed},         {"closed_threshold", kClosedTourRatio}};
}

ScenarioResult run_poincare(const ScenarioConfig& c) {
  ScenarioResult res;
  ClassicalOptions opts;
  opts.tol = c.tol.classical;
  PoincareSection sec;
  if (c.default_seeds) {
    if (!c.energy) config_error("poincare with default seeds needs 'energy' or a parameter set");
    sec = section_scan(default_seeds(), c.params, *c.energy, c.crossings, c.horizon, opts, c.threads);
  } else {
    sec = poincare_section(c.initial.point, c.params, c.crossings, c.horizon, opts);
  }
  res.table.header = {"q1", "p1", "q2", "p2", "time", "seed"};
  for (const auto& pt : sec.crossings)
    res.table.rows.push_back({pt.q1, pt.p1, pt.q2, pt.p2, pt.time, static_cast<double>(pt.seed)});
  res.results = {{"energy", sec.energy},
                 {"crossings", sec.crossings.size()},
                 {"energy_drift", sec.energy_drift},
                 {"exhausted", sec.exhausted},
                 {"inadmissible_seeds", sec.inadmissible_seeds}};
  if (!c.default_seeds) res.results["curve"] = curve_json(closed_curve_statistic(sec.crossings));
  if (sec.energy_drift > c.tol.energy_drift) {
    std::ostringstream os;
    os << "classical energy drift " << sec.energy_drift << " exceeds " << c.tol.energy_drift;
    res.violations.push_back(os.str());
  }
  res.head = {"none", 0.0, false};
  return res;
}

ScenarioResult run_loschmidt(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const auto times = uniform_times(c.horizon, c.samples);
  const TimeSeries L = loschmidt_echo(c.params, trunc, initial_state(c, trunc), times, c.err_scale);
  ScenarioResult res;
  res.table.header = {"t", "L"};
  for (std::size_t i = 0; i < L.size(); ++i) res.table.rows.push_back({L.times[i], L.values[i]});
  const double avg = time_average(L);
  res.results = {{"time_average", avg}, {"final", L.values.back()}};
  res.head = {"time_averaged_L", avg};
  return res;
}

ScenarioResult run_fidelity_scan(const ScenarioConfig& c, int n_max, bool last_only) {
  const FockTruncation trunc(n_max);
  std::vector<double> rs = c.r_values;
  if (last_only) rs = {c.r_values.back()};
  const TimeSeries scan = fidelity_vs_r_scan(c.params, c.initial.labels, c.horizon, rs, trunc, c.threads);
  ScenarioResult res;
  res.table.header = {"r", "L_T"};
  std::size_t decreases = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    res.table.rows.push_back({scan.times[i], scan.values[i]});
    if (i && scan.values[i] < scan.values[i - 1]) ++decreases;
  }
  res.results = {{"T", c.horizon}, {"local_decreases", decreases}, {"L_at_max_r", scan.values.back()}};
  res.head = {"L_T_at_max_r", scan.values.back()};
  return res;
}

ScenarioResult run_otoc(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const auto times = uniform_times(c.horizon, c.samples);
  const SpectralPropagator H = diagonalize(build_H_eff(c.params, trunc));
  const TimeSeries var = otoc_variance(H, initial_state(c, trunc), times, trunc);
  const ScramblingTime st = scrambling_time(var);
  const auto window = c.fit_window ? *c.fit_window : default_fit_window(st.t_star);
  ScenarioResult res;
  res.table.header = {"t", "var_G"};
  for (std::size_t i = 0; i < var.size(); ++i) res.table.rows.push_back({var.times[i], var.values[i]});
  const double peak = var.values[st.index];
  res.results = {{"t_star", st.t_star},
                 {"t_star_at_horizon", st.at_horizon},
                 {"max_var", peak},
                 {"fit_window", {window.first, window.second}},
                 {"fit_window_source", c.fit_window ? "config" : "default [0.05 t*, 0.8 t*]"}};
  try {
    const LyapunovFit fit = lyapunov_fit(var, window.first, window.second);
    res.results["lambda_q"] = fit.lambda_q;
    res.results["r_squared"] = fit.r_squared;
    res.results["fit_points"] = fit.points;
    res.results["fit_reliable"] = fit.reliable;
  } catch (const InvalidArgument& e) {
    res.results["lambda_q"] = nullptr;
    res.results["fit_error"] = e.what();
  }
  res.head = {"max_var_G", peak};
  return res;
}

ScenarioResult run_otoc_direct(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const auto times = uniform_times(c.horizon, c.samples);
  const SpectralPropagator H = diagonalize(build_H_eff(c.params, trunc));
  const KetState phi = initial_state(c, trunc);
  OtocConfig full{c.epsilon, times, 0.1};
  OtocConfig half{0.5 * c.epsilon, times, 0.1};
  const OtocDirectResult f = otoc_direct(H, phi, full, trunc);
  const OtocDirectResult fh = otoc_direct(H, phi, half, trunc);
  const TimeSeries var = otoc_variance(H, phi, times, trunc);
  ScenarioResult res;
  res.table.header = {"t", "F", "F_half_eps", "var_G", "scaled", "scaled_half_eps"};
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s1 = (1.0 - f.f.values[i]) / (c.epsilon * c.epsilon);
    const double s2 = (1.0 - fh.f.values[i]) / (0.25 * c.epsilon * c.epsilon);
    res.table.rows.push_back({times[i], f.f.values[i], fh.f.values[i], var.values[i], s1, s2});
    if (var.values[i] > 0.0) worst = std::max(worst, std::abs(s1 - s2) / var.values[i]);
    peak = std::max(peak, s1);
  }
  res.results = {{"epsilon", c.epsilon},
                 {"half_epsilon_ratio_deviation", worst},
                 {"small_parameter_warning", f.small_parameter_warning},
                 {"max_scaled", peak}};
  res.head = {"max_scaled_otoc", peak};
  return res;
}

ScenarioResult run_entropy(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const auto times = uniform_times(c.horizon, c.samples);
  const OperatorMatrix Hm =
      c.hamiltonian == HamiltonianChoice::eff ? build_H_eff(c.params, trunc, c.err_scale)
                                              : build_H_rabi(c.params, trunc);
  const SpectralPropagator H = diagonalize(Hm);
  const KetState psi0 = initial_state(c, trunc);
  const TimeSeries S = entropy_series(H, psi0, times, trunc);
  const AveragedEntropy avg =
      time_averaged_entropy(H, psi0, c.horizon, trunc, c.samples, c.tol.entropy_rel, c.tol.max_samples);
  double plateau = 0.0;
  const std::size_t from = S.size() / 2;
  for (std::size_t i = from; i < S.size(); ++i) plateau += S.values[i];
  plateau /= static_cast<double>(S.size() - from);
  ScenarioResult res;
  res.table.header = {"t", "S"};
  for (std::size_t i = 0; i < S.size(); ++i) res.table.rows.push_back({S.times[i], S.values[i]});
  res.results = {{"time_averaged", avg.value},        {"averaging_samples", avg.samples},
                 {"averaging_last_change", avg.last_change}, {"averaging_converged", avg.converged},
                 {"plateau_second_half", plateau}};
  if (!avg.converged) res.violations.push_back("time-averaged entropy did not reach the requested relative tolerance");
  res.head = {"time_averaged_S", avg.value};
  return res;
}

// Admissible cell with the largest on-shell p2 (the most photon-heavy state),
// used as the truncation probe of a map.
std::optional<std::pair<double, double>> reference_cell(const ScenarioConfig& c) {
  std::optional<std::pair<double, double>> best;
  double best_p2 = -1.0;
  for (int i = 0; i < c.map.q1_points; ++i)
    for (int k = 0; k < c.map.p1_points; ++k) {
      const double q1 = c.map.q1_points == 1 ? c.map.q1_min
                                             : c.map.q1_min + (c.map.q1_max - c.map.q1_min) * i / (c.map.q1_points - 1);
      const double p1 = c.map.p1_points == 1 ? c.map.p1_min
                                             : c.map.p1_min + (c.map.p1_max - c.map.p1_min) * k / (c.map.p1_points - 1);
      if (!(q1 * q1 + p1 * p1 < 2.0)) continue;
      const auto root = solve_p2_on_shell(q1, p1, c.map.energy, c.params);
      if (root && root->p2 > best_p2) {
        best_p2 = root->p2;
        best = std::make_pair(q1, p1);
      }
    }
  return best;
}

ScenarioResult run_entropy_map(const ScenarioConfig& c, int n_max, bool reference_only) {
  const FockTruncation trunc(n_max);
  const auto ref = reference_cell(c);
  if (!ref) throw PreconditionError("entropy_map: no grid cell lies on the energy shell");
  ScenarioResult res;
  if (reference_only) {
    EntropyMapSpec one = c.map;
    one.q1_min = one.q1_max = ref->first;
    one.p1_min = one.p1_max = ref->second;
    one.q1_points = one.p1_points = 1;
    const EntropyMap m = entropy_map(c.params, trunc, one);
    res.head = {"reference_cell_S_bar", m.values(0, 0)};
    return res;
  }
  const EntropyMap m = entropy_map(c.params, trunc, c.map);
  res.table.header = {"q1", "p1", "p2", "S_bar", "masked"};
  double ref_value = 0.0;
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < m.q1_axis.size(); ++i)
    for (std::size_t k = 0; k < m.p1_axis.size(); ++k) {
      const auto ii = static_cast<Eigen::Index>(i), kk = static_cast<Eigen::Index>(k);
      const bool masked = m.is_masked(static_cast<int>(i), static_cast<int>(k));
      res.table.rows.push_back({m.q1_axis[i], m.p1_axis[k], m.p2(ii, kk), m.values(ii, kk), masked ? 1.0 : 0.0});
      if (!masked) ++admissible;
      if (m.q1_axis[i] == ref->first && m.p1_axis[k] == ref->second) ref_value = m.values(ii, kk);
    }
  res.results = {{"energy", c.map.energy},
                 {"admissible_cells", admissible},
                 {"unconverged_cells", m.unconverged},
                 {"reference_cell", {ref->first, ref->second}},
                 {"reference_cell_S_bar", ref_value}};
  if (m.unconverged)
    res.violations.push_back(std::to_string(m.unconverged) + " map cells did not reach the averaging tolerance");
  res.head = {"reference_cell_S_bar", ref_value};
  return res;
}

ScenarioResult run_recurrence(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const auto times = uniform_times(c.horizon, c.samples);
  const SpectralPropagator H = diagonalize(build_H_eff(c.params, trunc));
  const TimeSeries P = recurrence(H, initial_state(c, trunc), times);
  ScenarioResult res;
  res.table.header = {"t", "P"};
  for (std::size_t i = 0; i < P.size(); ++i) res.table.rows.push_back({P.times[i], P.values[i]});
  const double rev = revival_amplitude(P);
  res.results = {{"revival_amplitude", rev}, {"collapse_level", 0.5}};
  res.head = {"revival_amplitude", rev};
  return res;
}

ScenarioResult run_husimi(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const SpectralPropagator H = diagonalize(build_H_eff(c.params, trunc));
  const double t = c.snapshot_time ? *c.snapshot_time : c.horizon;
  const KetState psi = H.evolve(initial_state(c, trunc), t);
  HusimiGridSpec spec = default_husimi_grid(psi, trunc, c.husimi_points);
  if (c.husimi_radius) {
    spec.re_min = spec.im_min = -*c.husimi_radius;
    spec.re_max = spec.im_max = *c.husimi_radius;
  }
  const HusimiGrid grid = husimi(psi, trunc, spec, t);
  const double norm = grid.normalization();
  if (!(std::abs(norm - 1.0) <= 0.05)) {
    std::ostringstream os;
    os << "husimi: grid normalization " << norm << " outside [0.95, 1.05]; enlarge the grid";
    throw PreconditionError(os.str());
  }
  ScenarioResult res;
  res.table.header = {"re_beta", "im_beta", "Q"};
  for (std::size_t i = 0; i < grid.re_beta_axis.size(); ++i)
    for (std::size_t k = 0; k < grid.im_beta_axis.size(); ++k)
      res.table.rows.push_back({grid.re_beta_axis[i], grid.im_beta_axis[k],
                                grid.q_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))});
  const double spread = grid.spread();
  res.results = {{"snapshot_time", t},         {"normalization", norm}, {"mean", complex_json(grid.mean())},
                 {"spread", spread},           {"radius", spec.re_max}, {"points", c.husimi_points}};
  res.head = {"husimi_spread", spread};
  return res;
}

ScenarioResult run_frame_check(const ScenarioConfig& c, int n_max) {
  const FockTruncation trunc(n_max);
  const double angle = 0.5 * derive_params(c.params).omega_c_eff * c.horizon;
  const KetState psi0 =
      c.squeezed_initial
          ? tensor_product(KetState::basis(2, 0), squeezed_vacuum(*c.squeezed_initial, trunc, angle))
          : initial_state(c, trunc);
  FrameCheckOptions opts;
  opts.tolerance = c.tol.integrator;
  const FrameCheckResult fc = verify_frame_equivalence(c.params, psi0, c.horizon, c.frame_steps, trunc, opts);
  ScenarioResult res;
  res.table.header = {"t", "overlap"};
  for (std::size_t i = 0; i < fc.times.size(); ++i) res.table.rows.push_back({fc.times[i], fc.overlaps[i]});
  res.results = {{"min_overlap", fc.min_overlap},
                 {"lab_norm_drift", fc.lab_norm_drift},
                 {"max_edge_mass", fc.max_edge_mass},
                 {"squeezed_initial", c.squeezed_initial ? json(*c.squeezed_initial) : json(nullptr)},
                 {"squeezed_angle", c.squeezed_initial ? json(angle) : json(nullptr)},
                 {"integrator_steps", fc.integrator_steps},
                 {"threshold", c.tol.frame_overlap}};
  if (fc.min_overlap < c.tol.frame_overlap) {
    std::ostringstream os;
    os << "frame-equivalence overlap " << fc.min_overlap << " below " << c.tol.frame_overlap;
    res.violations.push_back(os.str());
  }
  res.head = {"min_overlap", fc.min_overlap};
  return res;
}

ScenarioResult compute(const ScenarioConfig& c, int n_max) {
  switch (c.scenario) {
    case Scenario::poincare: return run_poincare(c);
    case Scenario::loschmidt: return run_loschmidt(c, n_max);
    case Scenario::fidelity_scan: return run_fidelity_scan(c, n_max, false);
    case Scenario::otoc: return run_otoc(c, n_max);
    case Scenario::otoc_direct: return run_otoc_direct(c, n_max);
    case Scenario::entropy: return run_entropy(c, n_max);
    case Scenario::entropy_map: return run_entropy_map(c, n_max, false);
    case Scenario::recurrence: return run_recurrence(c, n_max);
    case Scenario::husimi: return run_husimi(c, n_max);
    case Scenario::frame_check: return run_frame_check(c, n_max);
  }
  throw InvalidArgument("unknown scenario");
}

int refined_n_max(int n_max) { return static_cast<int>(std::lround(1.5 * n_max)); }

ConvergenceReport make_report(const ScenarioConfig& c, const Headline& base) {
  ConvergenceReport r;
  r.headline = base.name;
  r.n_max = c.n_max;
  r.n_max_refined = refined_n_max(c.n_max);
  r.applicable = base.applicable;
  if (!base.applicable) return r;
  r.value = base.value;
  r.value_refined = headline(c, r.n_max_refined).value;
  r.relative_change = max_relative_change(r.value, r.value_refined);
  r.warning = !(r.relative_change <= c.tol.convergence);
  return r;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

json to_json(const ConvergenceReport& r) {
  json j = {{"headline", r.headline}, {"applicable", r.applicable}};
  if (!r.applicable) return j;
  j["n_max"] = r.n_max;
  j["n_max_refined"] = r.n_max_refined;
  j["value"] = r.value;
  j["value_refined"] = r.value_refined;
  j["relative_change"] = r.relative_change;
  j["warning"] = r.warning;
  return j;
}

Headline headline(const ScenarioConfig& c, int n_max) {
  switch (c.scenario) {
    case Scenario::fidelity_scan: return run_fidelity_scan(c, n_max, true).head;
    case Scenario::entropy_map: return run_entropy_map(c, n_max, true).head;
    default: return compute(c, n_max).head;
  }
}

ConvergenceReport convergence_report(const ScenarioConfig& c) { return make_report(c, headline(c, c.n_max)); }

RunOutcome run_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult res = compute(c, c.n_max);
  json meta;
  meta["version"] = kVersion;
  meta["scenario"] = to_string(c.scenario);
  meta["figure"] = lineage(c);
  meta["config"] = c.resolved;
  meta["derived"] = derived_json(c.params);
  meta["truncation"] = {{"n_max", c.n_max}, {"dim", 2 * (c.n_max + 1)}};
  meta["units"] = {{"frequency", "delta_c"}, {"time", "1/delta_c"}};
  meta["results"] = res.results;
  meta["headline"] = {{"name", res.head.name},
                      {"value", res.head.applicable ? json(res.head.value) : json(nullptr)}};
  if (c.convergence && res.head.applicable) {
    const ConvergenceReport rep = make_report(c, res.head);
    meta["convergence"] = to_json(rep);
  } else {
    meta["convergence"] = {{"headline", res.head.name}, {"applicable", false}};
  }
  meta["violations"] = res.violations;
  meta["columns"] = res.table.header;

  std::ostringstream body;
  csv::Writer w(body);
  w.header(res.table.header);
  for (const auto& row : res.table.rows) w.row(row);

  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.output_dir.string() + ": " + ec.message());
  RunOutcome out;
  out.csv_path = c.output_dir / (c.name + ".csv");
  out.metadata_path = c.output_dir / (c.name + ".meta.json");
  meta["csv"] = out.csv_path.filename().string();
  meta["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomically(out.csv_path, body.str());
  write_atomically(out.metadata_path, meta.dump(2) + "\n");
  out.metadata = std::move(meta);
  if (!res.violations.empty()) throw ConvergenceError("invariant violated: " + res.violations.front());
  return out;
}

}  // namespace chaoslab
