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
#ifndef FHOP_ORACLE_HPP_
#define FHOP_ORACLE_HPP_

#include <cstddef>
#include <span>

#include "fhop/detection_metrics.hpp"
#include "fhop/frame_io.hpp"
#include "fhop/skip_trace.hpp"
#include "fhop/state_space.hpp"

namespace fhop {

struct OracleConfig {
  double theta = 0.2;
  int k_max = 30;
  double iou_threshold = kDefaultIouThreshold;

  void validate() const;
};

// Fewest processed frames such that every skipped frame is within theta of
// its reference frame and no skip exceeds k_max. Among optimal skips at a
// frame the largest one wins.
SkipTrace oracle_select(const DetectionLog& log, const OracleConfig& cfg);

// True when every skipped frame is within theta of its reference frame.
bool is_feasible(const SkipTrace& trace, const DetectionLog& log, double theta,
                 double iou_threshold = kDefaultIouThreshold);

// Processes 0, k+1, 2(k+1), ...
SkipTrace fixed_skip(std::size_t n_frames, std::size_t k);

// Processes a frame when its whole-frame difference to the last processed
// frame is at least tau, or when k_max frames in a row have been skipped.
SkipTrace diff_threshold_baseline(std::span<const Frame> frames, double tau, int k_max,
                                  const StateConfig& cfg);

}  // namespace fhop

#endif  // FHOP_ORACLE_HPP_
