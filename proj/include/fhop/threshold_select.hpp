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
#ifndef FHOP_THRESHOLD_SELECT_HPP_
#define FHOP_THRESHOLD_SELECT_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fhop/detection_metrics.hpp"
#include "fhop/rl_core.hpp"
#include "fhop/skip_trace.hpp"

namespace fhop {

struct SweepPoint {
  double theta = 0;
  double fraction_processed = 0;  // |P| / |N|
  double error_per_skipped = 0;   // sum of skip errors / (|N| - |P|), 0 if nothing skipped
  double objective = 0;           // error^2 + fraction^2
};

struct SweepResult {
  double best_theta = 0;
  std::vector<SweepPoint> points;
};

// 0.10, 0.15, ..., 0.50
std::vector<double> default_theta_grid();

// Sum over processed frames of their cumulative skip error, divided by the
// number of skipped frames; 0 when no frame was skipped.
double error_per_skipped_frame(const SkipTrace& trace, const DetectionLog& log,
                               double iou_threshold = kDefaultIouThreshold);

using TraceStrategy = std::function<SkipTrace(double theta)>;

// Runs the strategy at each grid theta and returns the theta minimizing
// error^2 + fraction^2, ties toward the smaller theta.
SweepResult sweep_theta(const DetectionLog& log, const TraceStrategy& strategy,
                        std::span<const double> grid, double iou_threshold = kDefaultIouThreshold);

SweepResult sweep_theta_oracle(const DetectionLog& log, std::span<const double> grid, int k_max,
                               double iou_threshold = kDefaultIouThreshold);

// Retrains an agent per theta on (frames, log) and evaluates it there.
SweepResult sweep_theta_agent(std::span<const Frame> frames, const DetectionLog& log,
                              const StateConfig& state_cfg, const RLConfig& rl_cfg,
                              std::span<const double> grid, std::uint64_t seed);

}  // namespace fhop

#endif  // FHOP_THRESHOLD_SELECT_HPP_
