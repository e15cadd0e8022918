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

#include "chaoslab/chaoslab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/model.hpp"
#include "core/propagation.hpp"
#include "core/runner.hpp"
#include "core/semiclassical.hpp"

using namespace chaoslab;

struct cl_system {
  SystemParams params;
  FockTruncation trunc;
  std::mutex mutex;
  std::optional<SpectralPropagator> eff, rabi;

  const SpectralPropagator& propagator(cl_hamiltonian h) {
    std::lock_guard lock(mutex);
    auto& slot = h == CL_H_RABI ? rabi : eff;
    if (!slot) slot = diagonalize(h == CL_H_RABI ? build_H_rabi(params, trunc) : build_H_eff(params, trunc));
    return *slot;
  }
};

struct cl_state {
  KetState psi;
};

struct cl_series {
  TimeSeries data;
};

namespace {

thread_local std::string last_error;

cl_status fail(cl_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class Fn>
cl_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const ConfigError& e) {
    return fail(CL_ERR_CONFIG, e.what());
  } catch (const PreconditionError& e) {
    return fail(CL_ERR_PRECONDITION, e.what());
  } catch (const ConvergenceError& e) {
    return fail(CL_ERR_CONVERGENCE, e.what());
  } catch (const InvalidArgument& e) {
    return fail(CL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(CL_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(CL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CL_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cl_status null_argument(const char* name) { return fail(CL_ERR_INVALID_ARGUMENT, std::string(name) + " is null"); }

template <class Compute>
cl_status make_series(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out,
                      Compute&& compute) {
  if (!sys) return null_argument("system");
  if (!st) return null_argument("state");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    if (st->psi.dim() != sys->trunc.dim()) throw InvalidArgument("state does not belong to this system");
    const auto times = uniform_times(T, samples);
    *out = new cl_series{compute(times)};
    return CL_OK;
  });
}

}  // namespace

extern "C" {

const char* cl_last_error(void) { return last_error.c_str(); }

const char* cl_version(void) { return "0.1.0"; }

void cl_string_free(char* s) { std::free(s); }

cl_status cl_run(const char* config_path, char** summary_json) {
  if (!config_path) return null_argument("config_path");
  if (summary_json) *summary_json = nullptr;
  return guarded([&] {
    const ScenarioConfig cfg = load_config(config_path);
    const RunOutcome out = run_scenario(cfg);
    if (summary_json) {
      const nlohmann::json summary = {{"csv", out.csv_path.string()},
                                      {"metadata", out.metadata_path.string()},
                                      {"figure", out.metadata.at("figure")},
                                      {"headline", out.metadata.at("headline")},
                                      {"convergence", out.metadata.at("convergence")}};
      *summary_json = duplicate(summary.dump(2));
    }
    return CL_OK;
  });
}

cl_status cl_converge(const char* config_path, char** report_json) {
  if (!config_path) return null_argument("config_path");
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    const ScenarioConfig cfg = load_config(config_path);
    const ConvergenceReport rep = convergence_report(cfg);
    if (report_json) *report_json = duplicate(to_json(rep).dump(2));
    if (rep.warning) {
      last_error = "headline '" + rep.headline + "' changed by " + std::to_string(rep.relative_change) +
                   " under n_max " + std::to_string(rep.n_max) + " -> " + std::to_string(rep.n_max_refined);
      return CL_ERR_CONVERGENCE;
    }
    return CL_OK;
  });
}

cl_status cl_presets_json(char** out_json) {
  if (!out_json) return null_argument("out_json");
  return guarded([&] {
    *out_json = duplicate(presets_json().dump(2));
    return CL_OK;
  });
}

cl_status cl_system_create(double delta_a, double g, double r, int n_max, cl_system** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const SystemParams p = SystemParams::from_squeezing(delta_a, g, r);
    const FockTruncation trunc(n_max);
    *out = new cl_system{p, trunc, {}, {}, {}};
    return CL_OK;
  });
}

void cl_system_free(cl_system* sys) { delete sys; }

cl_status cl_system_derived(const cl_system* sys, cl_derived* out) {
  if (!sys) return null_argument("system");
  if (!out) return null_argument("out");
  return guarded([&] {
    const DerivedParams d = derive_params(sys->params);
    *out = {d.g_tilde, d.omega_c_eff, d.eta, d.g_crit, d.phase == Phase::superradiant ? 1 : 0};
    return CL_OK;
  });
}

cl_status cl_classical_energy(const cl_system* sys, double q1, double p1, double q2, double p2, double* out) {
  if (!sys) return null_argument("system");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = classical_energy(PhasePoint{q1, p1, q2, p2}, sys->params);
    return CL_OK;
  });
}

cl_status cl_solve_p2(const cl_system* sys, double q1, double p1, double energy, double* p2) {
  if (!sys) return null_argument("system");
  if (!p2) return null_argument("p2");
  return guarded([&] {
    const auto root = solve_p2_on_shell(q1, p1, energy, sys->params);
    if (!root) throw PreconditionError("no real p2 places the point on the requested shell");
    *p2 = root->p2;
    return CL_OK;
  });
}

cl_status cl_state_coherent(const cl_system* sys, double tau_re, double tau_im, double beta_re, double beta_im,
                            cl_state** out) {
  if (!sys) return null_argument("system");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new cl_state{product_state({tau_re, tau_im}, {beta_re, beta_im}, sys->trunc)};
    return CL_OK;
  });
}

void cl_state_free(cl_state* st) { delete st; }

cl_status cl_state_entropy(const cl_system* sys, const cl_state* st, double* out) {
  if (!sys) return null_argument("system");
  if (!st) return null_argument("state");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = linear_entropy(st->psi, sys->trunc);
    return CL_OK;
  });
}

cl_status cl_entropy_series(cl_system* sys, const cl_state* st, double T, size_t samples, cl_hamiltonian h,
                            cl_series** out) {
  if (h != CL_H_EFF && h != CL_H_RABI) return fail(CL_ERR_INVALID_ARGUMENT, "unknown Hamiltonian selector");
  return make_series(sys, st, T, samples, out, [&](const std::vector<double>& times) {
    return entropy_series(sys->propagator(h), st->psi, times, sys->trunc);
  });
}

cl_status cl_otoc_variance(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out) {
  return make_series(sys, st, T, samples, out, [&](const std::vector<double>& times) {
    return otoc_variance(sys->propagator(CL_H_EFF), st->psi, times, sys->trunc);
  });
}

cl_status cl_recurrence(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out) {
  return make_series(sys, st, T, samples, out, [&](const std::vector<double>& times) {
    return recurrence(sys->propagator(CL_H_EFF), st->psi, times);
  });
}

cl_status cl_loschmidt(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out) {
  return make_series(sys, st, T, samples, out, [&](const std::vector<double>& times) {
    return loschmidt_echo(sys->propagator(CL_H_RABI), sys->propagator(CL_H_EFF), st->psi, times);
  });
}

size_t cl_series_length(const cl_series* s) { return s ? s->data.size() : 0; }

cl_status cl_series_copy(const cl_series* s, double* times, double* values, size_t capacity) {
  if (!s) return null_argument("series");
  const size_t n = std::min(capacity, s->data.size());
  if (times) std::copy_n(s->data.times.begin(), n, times);
  if (values) std::copy_n(s->data.values.begin(), n, values);
  return CL_OK;
}

void cl_series_free(cl_series* s) { delete s; }

}  // extern "C"
