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

/* C interface of the chaoslab library. Every function returns a cl_status;
 * on failure cl_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * cl_string_free. Handles are opaque and released by their *_free function. */

#ifndef CHAOSLAB_CHAOSLAB_H
#define CHAOSLAB_CHAOSLAB_H

#include <stddef.h>

#if defined(CHAOSLAB_BUILDING_LIBRARY)
#define CL_API __attribute__((visibility("default")))
#else
#define CL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cl_status {
  CL_OK = 0,
  CL_ERR_INTERNAL = 1,
  CL_ERR_CONFIG = 2,
  CL_ERR_PRECONDITION = 3,
  CL_ERR_CONVERGENCE = 4,
  CL_ERR_INVALID_ARGUMENT = 5,
  CL_ERR_IO = 6
} cl_status;

typedef enum cl_hamiltonian { CL_H_EFF = 0, CL_H_RABI = 1 } cl_hamiltonian;

typedef struct cl_system cl_system; /* parameters + truncation, caches propagators */
typedef struct cl_state cl_state;   /* normalized state on a system's space */
typedef struct cl_series cl_series; /* (time, value) samples */

typedef struct cl_derived {
  double g_tilde;
  double omega_c_eff;
  double eta;
  double g_crit;
  int superradiant; /* 1 when g_tilde > g_crit */
} cl_derived;

CL_API const char* cl_last_error(void);
CL_API const char* cl_version(void);
CL_API void cl_string_free(char* s);

/* Scenario runner. summary_json (optional) receives output paths, headline
 * and convergence report. Invariant violations return an error after the
 * outputs were written. */
CL_API cl_status cl_run(const char* config_path, char** summary_json);
/* Headline at n_max and 1.5 n_max. Returns CL_ERR_CONVERGENCE when the
 * relative change exceeds the configured limit; the report is still set. */
CL_API cl_status cl_converge(const char* config_path, char** report_json);
CL_API cl_status cl_presets_json(char** out_json);

CL_API cl_status cl_system_create(double delta_a, double g, double r, int n_max, cl_system** out);
CL_API void cl_system_free(cl_system* sys);
CL_API cl_status cl_system_derived(const cl_system* sys, cl_derived* out);
CL_API cl_status cl_classical_energy(const cl_system* sys, double q1, double p1, double q2, double p2,
                                     double* out);
/* Largest p2 >= 0 placing (q1, p1, 0, p2) on the shell H = energy. */
CL_API cl_status cl_solve_p2(const cl_system* sys, double q1, double p1, double energy, double* p2);

/* |tau> (x) |beta> */
CL_API cl_status cl_state_coherent(const cl_system* sys, double tau_re, double tau_im, double beta_re,
                                   double beta_im, cl_state** out);
CL_API void cl_state_free(cl_state* st);
CL_API cl_status cl_state_entropy(const cl_system* sys, const cl_state* st, double* out);

/* Series sampled at `samples` uniform times in [0, T]. */
CL_API cl_status cl_entropy_series(cl_system* sys, const cl_state* st, double T, size_t samples,
                                   cl_hamiltonian h, cl_series** out);
CL_API cl_status cl_otoc_variance(cl_system* sys, const cl_state* st, double T, size_t samples,
                                  cl_series** out);
CL_API cl_status cl_recurrence(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out);
CL_API cl_status cl_loschmidt(cl_system* sys, const cl_state* st, double T, size_t samples, cl_series** out);

CL_API size_t cl_series_length(const cl_series* s);
/* Copies up to `capacity` samples; either output pointer may be NULL. */
CL_API cl_status cl_series_copy(const cl_series* s, double* times, double* values, size_t capacity);
CL_API void cl_series_free(cl_series* s);

#ifdef __cplusplus
}
#endif

#endif /* CHAOSLAB_CHAOSLAB_H */
