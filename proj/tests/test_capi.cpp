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

// Exercises the shared library through its C interface only.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "chaoslab/chaoslab.h"

namespace {

namespace fs = std::filesystem;

struct SystemDeleter {
  void operator()(cl_system* s) const { cl_system_free(s); }
};
struct StateDeleter {
  void operator()(cl_state* s) const { cl_state_free(s); }
};
struct SeriesDeleter {
  void operator()(cl_series* s) const { cl_series_free(s); }
};
using SystemPtr = std::unique_ptr<cl_system, SystemDeleter>;
using StatePtr = std::unique_ptr<cl_state, StateDeleter>;
using SeriesPtr = std::unique_ptr<cl_series, SeriesDeleter>;

SystemPtr make_system(double da, double g, double r, int n_max) {
  cl_system* s = nullptr;
  EXPECT_EQ(cl_system_create(da, g, r, n_max, &s), CL_OK) << cl_last_error();
  return SystemPtr(s);
}

StatePtr make_state(const cl_system* sys, double tr, double ti, double br, double bi) {
  cl_state* st = nullptr;
  EXPECT_EQ(cl_state_coherent(sys, tr, ti, br, bi, &st), CL_OK) << cl_last_error();
  return StatePtr(st);
}

std::vector<double> values(const cl_series* s) {
  std::vector<double> v(cl_series_length(s));
  EXPECT_EQ(cl_series_copy(s, nullptr, v.data(), v.size()), CL_OK);
  return v;
}

TEST(CApi, Version) { EXPECT_STREQ(cl_version(), "0.1.0"); }

TEST(CApi, DerivedParameters) {
  auto sys = make_system(0.02, 2e-4, 4.0, 10);
  cl_derived d{};
  ASSERT_EQ(cl_system_derived(sys.get(), &d), CL_OK);
  EXPECT_NEAR(d.g_tilde, 0.0054598150033144239, 1e-15);
  EXPECT_NEAR(d.omega_c_eff, 0.00067092518030234129, 1e-15);
  EXPECT_EQ(d.superradiant, 1);
}

TEST(CApi, ClassicalHelpers) {
  auto sys = make_system(0.02, 2e-4, 4.0, 10);
  double e = 0.0, p2 = 0.0;
  ASSERT_EQ(cl_classical_energy(sys.get(), 0.0, 0.0, 0.0, 0.0, &e), CL_OK);
  EXPECT_DOUBLE_EQ(e, -0.01);
  ASSERT_EQ(cl_solve_p2(sys.get(), 1.4, 0.0, 0.018, &p2), CL_OK);
  EXPECT_NEAR(p2, 5.00400338819, 1e-9);
  EXPECT_EQ(cl_solve_p2(sys.get(), 0.0, 0.0, -5.0, &p2), CL_ERR_PRECONDITION);
  EXPECT_NE(std::string(cl_last_error()), "");
  EXPECT_EQ(cl_classical_energy(sys.get(), 1.5, 1.5, 0.0, 0.0, &e), CL_ERR_PRECONDITION);
}

TEST(CApi, ErrorCodes) {
  cl_system* s = nullptr;
  EXPECT_EQ(cl_system_create(0.02, 2e-4, -1.0, 10, &s), CL_ERR_PRECONDITION);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(cl_system_create(0.02, 2e-4, 1.0, 0, &s), CL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(cl_system_create(0.02, 2e-4, 1.0, 10, nullptr), CL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(cl_system_derived(nullptr, nullptr), CL_ERR_INVALID_ARGUMENT);
  auto sys = make_system(0.02, 2e-4, 4.0, 40);
  cl_state* st = nullptr;
  EXPECT_EQ(cl_state_coherent(sys.get(), 0.0, 0.0, 0.0, 5.45, &st), CL_ERR_PRECONDITION);
  EXPECT_EQ(st, nullptr);
  cl_series_free(nullptr);
  cl_state_free(nullptr);
  cl_system_free(nullptr);
  cl_string_free(nullptr);
}

TEST(CApi, StateMismatch) {
  auto a = make_system(0.75, 0.0375, 2.0, 20);
  auto b = make_system(0.75, 0.0375, 2.0, 30);
  auto st = make_state(a.get(), 1.0, 0.0, 0.0, 0.0);
  cl_series* out = nullptr;
  EXPECT_EQ(cl_recurrence(b.get(), st.get(), 10.0, 5, &out), CL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(out, nullptr);
}

TEST(CApi, Series) {
  auto sys = make_system(0.75, 0.0375, 2.0, 60);
  auto st = make_state(sys.get(), 1.0, 0.0, 0.0, 0.0);
  double s0 = 1.0;
  ASSERT_EQ(cl_state_entropy(sys.get(), st.get(), &s0), CL_OK);
  EXPECT_NEAR(s0, 0.0, 1e-12);

  cl_series* raw = nullptr;
  ASSERT_EQ(cl_otoc_variance(sys.get(), st.get(), 100.0, 11, &raw), CL_OK);
  SeriesPtr var(raw);
  ASSERT_EQ(cl_series_length(var.get()), 11u);
  std::vector<double> t(11), v(11);
  ASSERT_EQ(cl_series_copy(var.get(), t.data(), v.data(), 11), CL_OK);
  EXPECT_EQ(t.back(), 100.0);
  EXPECT_NEAR(v[0], 0.25, 1e-14);

  ASSERT_EQ(cl_recurrence(sys.get(), st.get(), 100.0, 11, &raw), CL_OK);
  SeriesPtr rec(raw);
  EXPECT_NEAR(values(rec.get())[0], 1.0, 1e-13);

  ASSERT_EQ(cl_loschmidt(sys.get(), st.get(), 100.0, 11, &raw), CL_OK);
  SeriesPtr los(raw);
  EXPECT_NEAR(values(los.get())[0], 1.0, 1e-13);

  ASSERT_EQ(cl_entropy_series(sys.get(), st.get(), 100.0, 11, CL_H_EFF, &raw), CL_OK);
  SeriesPtr eff(raw);
  ASSERT_EQ(cl_entropy_series(sys.get(), st.get(), 100.0, 11, CL_H_RABI, &raw), CL_OK);
  SeriesPtr rabi(raw);
  for (double x : values(eff.get())) EXPECT_LE(x, 0.5);
  EXPECT_EQ(cl_entropy_series(sys.get(), st.get(), 100.0, 11, static_cast<cl_hamiltonian>(7), &raw),
            CL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, PresetsJson) {
  char* text = nullptr;
  ASSERT_EQ(cl_presets_json(&text), CL_OK);
  const std::string s(text);
  cl_string_free(text);
  EXPECT_NE(s.find("\"C1\""), std::string::npos);
  EXPECT_NE(s.find("5.4461"), std::string::npos);
}

TEST(CApi, RunAndConverge) {
  const fs::path dir = fs::temp_directory_path() / "chaoslab_capi_run";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "otoc.json";
  std::ofstream(cfg) << R"({"scenario": "otoc", "params": {"set": "a"}, "horizon": 100, "samples": 11,
                           "n_max": 40, "threads": 1, "output_dir": ")"
                     << dir.string() << "\"}";
  char* summary = nullptr;
  ASSERT_EQ(cl_run(cfg.c_str(), &summary), CL_OK) << cl_last_error();
  ASSERT_NE(summary, nullptr);
  EXPECT_NE(std::string(summary).find("fig4a"), std::string::npos);
  cl_string_free(summary);
  EXPECT_TRUE(fs::exists(dir / "otoc.csv"));

  char* report = nullptr;
  ASSERT_EQ(cl_converge(cfg.c_str(), &report), CL_OK) << cl_last_error();
  EXPECT_NE(std::string(report).find("relative_change"), std::string::npos);
  cl_string_free(report);

  EXPECT_EQ(cl_run((dir / "missing.json").c_str(), nullptr), CL_ERR_CONFIG);
  EXPECT_EQ(cl_run(nullptr, nullptr), CL_ERR_INVALID_ARGUMENT);
  fs::remove_all(dir);
}

}  // namespace
