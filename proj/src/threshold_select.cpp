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
#include "fhop/threshold_select.hpp"

#include <cstdio>

#include "fhop/agent.hpp"
#include "fhop/error.hpp"
#include "fhop/oracle.hpp"

namespace fhop {

std::vector<double> default_theta_grid() {
  return {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
}

double error_per_skipped_frame(const SkipTrace& trace, const DetectionLog& log,
                               double iou_threshold) {
  if (trace.total_frames() != log.size()) {
    throw Error(ErrorCode::kRange, "trace covers " + std::to_string(trace.total_frames()) +
                                       " frames but log has " + std::to_string(log.size()));
  }
  const std::size_t skipped = trace.total_frames() - trace.processed_count();
  if (skipped == 0) return 0.0;
  double total = 0.0;
  for (const TraceEntry& e : trace.entries()) {
    total += skip_error(log, e.processed_index, e.skip_length, iou_threshold);
  }
  return total / static_cast<double>(skipped);
}

SweepResult sweep_theta(const DetectionLog& log, const TraceStrategy& strategy,
                        std::span<const double> grid, double iou_threshold) {
  if (log.empty()) throw Error(ErrorCode::kEmpty, "threshold sweep needs a non-empty log");
  if (grid.empty()) throw Error(ErrorCode::kValidation, "threshold grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::kValidation, "threshold grid must ascend");
  }
  SweepResult result;
  for (const double theta : grid) {
    SkipTrace trace;
    try {
      trace = strategy(theta);
    } catch (const Error& e) {
      char prefix[48];
      std::snprintf(prefix, sizeof prefix, "theta=%.4g: ", theta);
      throw Error(e.code(), prefix + std::string(e.what()));
    }
    SweepPoint p;
    p.theta = theta;
    p.fraction_processed = trace.fraction_processed();
    p.error_per_skipped = error_per_skipped_frame(trace, log, iou_threshold);
    p.objective = p.error_per_skipped * p.error_per_skipped + p.fraction_processed * p.fraction_processed;
    result.points.push_back(p);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].objective < result.points[best].objective) best = i;
  }
  result.best_theta = result.points[best].theta;
  return result;
}

SweepResult sweep_theta_oracle(const DetectionLog& log, std::span<const double> grid, int k_max,
                               double iou_threshold) {
  return sweep_theta(
      log,
      [&](double theta) { return oracle_select(log, OracleConfig{theta, k_max, iou_threshold}); },
      grid, iou_threshold);
}

SweepResult sweep_theta_agent(std::span<const Frame> frames, const DetectionLog& log,
                              const StateConfig& state_cfg, const RLConfig& rl_cfg,
                              std::span<const double> grid, std::uint64_t seed) {
  return sweep_theta(
      log,
      [&](double theta) {
        RLConfig cfg = rl_cfg;
        cfg.theta = theta;
        const AgentArtifact agent = train_agent(frames, log, state_cfg, cfg, seed);
        return state_cfg.variant == FeatureVariant::kDetection
                   ? run_agent_on_detections(log, agent, cfg.iou_threshold)
                   : run_agent(frames, agent);
      },
      grid, rl_cfg.iou_threshold);
}

}  // namespace fhop
