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
#ifndef FHOP_PIPELINE_HPP_
#define FHOP_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fhop/agent.hpp"
#include "fhop/oracle.hpp"
#include "fhop/rl_core.hpp"
#include "fhop/state_space.hpp"

namespace fhop {

struct BaselineConfig {
  std::string kind = "fixed";  // fixed | diff
  int k = 5;                   // fixed skip length
  double tau = 0.05;           // diff threshold on the changed-pixel fraction
};

struct SweepConfig {
  std::string strategy = "oracle";  // oracle | agent
  std::vector<double> grid;         // empty: 0.10..0.50 step 0.05
};

struct SynthConfig {
  std::string preset = "burst";
  std::size_t n_frames = 0;  // 0: preset default
};

struct RunConfig {
  std::string frames;  // frame directory
  std::string log;     // detections.jsonl
  std::string agent;   // agent artifact to load
  std::string trace;   // trace to evaluate
  std::optional<int> downscale;
  std::uint64_t seed = 1;
  double split = 0.5;
  std::vector<double> targets{0.7, 0.8, 0.9};
  double iou_threshold = kDefaultIouThreshold;
  std::string range;  // train | test | all; empty picks the mode's default
  StateConfig state;
  RLConfig rl;
  OracleConfig oracle;
  BaselineConfig baseline;
  SweepConfig sweep;
  SynthConfig synth;

  void validate() const;
};

// Keys absent from the JSON keep their defaults; oracle theta and k_max
// default to the rl values. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& cfg);

// Reads the config file (if any), applies `overrides_json` as a JSON merge
// patch and parses the result.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::string& overrides_json = "");

std::vector<std::string> pipeline_modes();

struct PipelineResult {
  std::vector<std::filesystem::path> written;
  std::string summary;  // human-readable, one line per fact
};

PipelineResult run_pipeline(const std::string& mode, const RunConfig& cfg,
                            const std::filesystem::path& out_dir, const WarningSink& warn = {});

}  // namespace fhop

#endif  // FHOP_PIPELINE_HPP_
