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
#ifndef FHOP_AGENT_HPP_
#define FHOP_AGENT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "fhop/rl_core.hpp"
#include "fhop/state_space.hpp"

namespace fhop {

inline constexpr std::uint32_t kAgentFormatVersion = 1;

// The trained agent as persisted and deployed.
struct AgentArtifact {
  std::uint32_t format_version = kAgentFormatVersion;
  std::uint64_t config_fingerprint = 0;
  // Feature extraction parameters; k/minibatch/segment fields are informational.
  StateConfig state_config;
  StateModel state_model;
  QTable q_table;
  // Raster size the pixel features were trained on; 0 for detection states.
  int frame_width = 0;
  int frame_height = 0;

  // Throws kValidation when the Q rows differ from the cluster count or the
  // model does not match the configured variant.
  void validate() const;
  std::size_t k_max() const { return q_table.actions() - 1; }
};

// FNV-1a over a canonical rendering of everything that shapes training.
std::uint64_t config_fingerprint(const StateConfig& state_cfg, const RLConfig& rl_cfg,
                                 std::uint64_t seed);

// Fits the state model, then trains Q. `log` must be aligned with `frames`
// (frames may be empty for detection-based states).
AgentArtifact train_agent(std::span<const Frame> frames, const DetectionLog& log,
                          const StateConfig& state_cfg, const RLConfig& rl_cfg,
                          std::uint64_t seed);

// Greedy skip decisions over pixel frames only.
SkipTrace run_agent(std::span<const Frame> frames, const AgentArtifact& agent);
// Same for agents trained on detection-based states.
SkipTrace run_agent_on_detections(const DetectionLog& log, const AgentArtifact& agent,
                                  double iou_threshold = kDefaultIouThreshold);

using WarningSink = std::function<void(const std::string&)>;

void save_agent(const AgentArtifact& agent, const std::filesystem::path& path);
std::string serialize_agent(const AgentArtifact& agent);
// When expected_fingerprint is given and differs, a warning goes to `warn`.
AgentArtifact load_agent(const std::filesystem::path& path,
                         std::optional<std::uint64_t> expected_fingerprint = std::nullopt,
                         const WarningSink& warn = {});
AgentArtifact deserialize_agent(const std::string& bytes);

}  // namespace fhop

#endif  // FHOP_AGENT_HPP_
