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

// chaoslab command-line entry point. Talks to the library through its C API.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "chaoslab/chaoslab.h"

namespace {

// CLI exit codes: 2 config, 3 precondition, 4 non-convergence, 1 other.
int exit_code(cl_status s) {
  switch (s) {
    case CL_OK: return 0;
    case CL_ERR_CONFIG:
    case CL_ERR_INVALID_ARGUMENT: return 2;
    case CL_ERR_PRECONDITION: return 3;
    case CL_ERR_CONVERGENCE: return 4;
    default: return 1;
  }
}

void print_and_free(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  std::fputc('\n', stdout);
  cl_string_free(text);
}

int report(cl_status s, const char* command) {
  if (s != CL_OK) std::fprintf(stderr, "chaoslab %s: %s\n", command, cl_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light cavity QED chaos diagnostics"};
  app.set_version_flag("--version", std::string(cl_version()));
  app.require_subcommand(1);

  std::string run_config, converge_config;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV data plus a JSON metadata sidecar");
  run->add_option("config", run_config, "Scenario configuration (JSON)")->required();
  auto* presets = app.add_subcommand("presets", "List named parameter sets and initial states");
  auto* converge = app.add_subcommand("converge", "Compare the scenario headline at n_max and 1.5 n_max");
  converge->add_option("config", converge_config, "Scenario configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  char* text = nullptr;
  if (*run) {
    const cl_status s = cl_run(run_config.c_str(), &text);
    print_and_free(text);
    return report(s, "run");
  }
  if (*presets) {
    const cl_status s = cl_presets_json(&text);
    print_and_free(text);
    return report(s, "presets");
  }
  const cl_status s = cl_converge(converge_config.c_str(), &text);
  print_and_free(text);
  return report(s, "converge");
}
