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
#ifndef FHOP_DETECTION_METRICS_HPP_
#define FHOP_DETECTION_METRICS_HPP_

#include <cstddef>
#include <vector>

#include "fhop/frame_io.hpp"

namespace fhop {

class SkipTrace;

inline constexpr double kDefaultIouThreshold = 0.5;

struct MatchPair {
  std::size_t ref = 0;
  std::size_t other = 0;
  double iou = 0;
};

struct MatchResult {
  std::size_t hits = 0;
  std::vector<MatchPair> pairs;
  std::size_t ref_count = 0;
  std::size_t other_count = 0;
};

double iou(const BBox& a, const BBox& b);

// Greedy same-class matching: candidate pairs with iou >= threshold are taken
// in descending iou order (ties: lower ref index, then lower other index) when
// both sides are still free.
MatchResult match_detections(const DetectionSet& ref, const DetectionSet& other,
                             double iou_threshold = kDefaultIouThreshold);

// F1 of `other` (detected side) against `ref` (actual side). Two empty sets
// score 1, exactly one empty set scores 0.
double f1_score(const DetectionSet& ref, const DetectionSet& other,
                double iou_threshold = kDefaultIouThreshold);

// 1 - F1 between frames i and j of the log.
double frame_distance(const DetectionLog& log, std::size_t i, std::size_t j,
                      double iou_threshold = kDefaultIouThreshold);

// Cumulative distance from frame i to each of the k frames after it.
double skip_error(const DetectionLog& log, std::size_t i, std::size_t k,
                  double iou_threshold = kDefaultIouThreshold);

// Mean over frames of 1 - |c_ref - c_sur| / max(c_ref, c_sur, 1), where the
// surrogate of a skipped frame is its preceding processed frame.
double count_accuracy(const DetectionLog& log, const SkipTrace& trace);

}  // namespace fhop

#endif  // FHOP_DETECTION_METRICS_HPP_
