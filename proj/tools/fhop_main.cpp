/* Copyright 2026 The fhop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// fhop: command-line front end over the C interface.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fhop/fhop.h"

namespace {

const std::vector<std::string> kModes = {"train", "run",  "oracle", "baseline",
                                         "sweep", "eval", "synth",  "report"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned frame skipping for detection pipelines"};
  app.set_version_flag("--version", std::string(fhop_version()));

  std::string mode;
  std::string config;
  std::string out = ".";
  app.add_option("mode", mode, "train | run | oracle | baseline | sweep | eval | synth | report")
      ->required()
      ->check(CLI::IsMember(kModes));
  app.add_option("--config", config, "JSON config mirroring the run configuration");
  app.add_option("--out", out, "Output directory")->capture_default_str();

  // Flags become a JSON merge patch over the config file.
  nlohmann::json patch = nlohmann::json::object();
  using Paths = std::vector<std::string>;
  auto flag = [&]<typename T>(const char* name, const char* help, Paths paths, T*) {
    return app.add_option_function<T>(
        name,
        [&patch, paths](const T& v) {
          for (const std::string& p : paths) patch[nlohmann::json::json_pointer(p)] = v;
        },
        help);
  };
  auto str_opt = [&](const char* name, const char* help, Paths paths) {
    return flag(name, help, std::move(paths), static_cast<std::string*>(nullptr));
  };
  auto num_opt = [&](const char* name, const char* help, Paths paths) {
    return flag(name, help, std::move(paths), static_cast<double*>(nullptr));
  };
  auto int_opt = [&](const char* name, const char* help, Paths paths) {
    return flag(name, help, std::move(paths), static_cast<long long*>(nullptr));
  };

  app.add_option_function<unsigned long long>(
      "--seed", [&patch](unsigned long long v) { patch["seed"] = v; }, "Random seed");
  str_opt("--frames", "Frame directory", {"/frames"});
  str_opt("--log", "Detection log (JSON Lines)", {"/log"});
  str_opt("--agent", "Agent artifact to load", {"/agent"});
  str_opt("--trace", "Skip trace to evaluate", {"/trace"});
  str_opt("--range", "train | test | all", {"/range"});
  str_opt("--preset", "Synthetic preset", {"/synth/preset"});
  str_opt("--baseline", "fixed | diff", {"/baseline/kind"});
  str_opt("--strategy", "Sweep strategy: oracle | agent", {"/sweep/strategy"});
  str_opt("--variant", "State features: chunk | whole | detection", {"/state/variant"});
  num_opt("--theta", "Error threshold", {"/rl/theta", "/oracle/theta"});
  num_opt("--tau", "Difference threshold for the diff baseline", {"/baseline/tau"});
  int_opt("--k", "Skip length for the fixed baseline", {"/baseline/k"});
  int_opt("--k-max", "Largest skip", {"/rl/k_max", "/oracle/k_max"});
  int_opt("--epochs", "Training epochs", {"/rl/epochs"});
  int_opt("--n-frames", "Synthetic scene length", {"/synth/n_frames"});
  int_opt("--downscale", "Longest side after nearest-neighbour downscaling", {"/downscale"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  char* summary = nullptr;
  const std::string overrides = patch.dump();
  const fhop_status st = fhop_run_pipeline(mode.c_str(), config.empty() ? nullptr : config.c_str(),
                                           overrides.c_str(), out.c_str(), &summary);
  if (st != FHOP_OK) {
    std::fprintf(stderr, "fhop %s: %s: %s\n", mode.c_str(), fhop_status_name(st),
                 fhop_last_error());
    return fhop_exit_code(st);
  }
  std::fputs(summary, stdout);
  fhop_string_free(summary);
  return 0;
}
