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
#include "fhop/detection_metrics.hpp"

#include <algorithm>
#include <cstdlib>

#include "fhop/error.hpp"
#include "fhop/skip_trace.hpp"

namespace fhop {

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? std::min(1.0, inter / uni) : 0.0;
}

MatchResult match_detections(const DetectionSet& ref, const DetectionSet& other,
                             double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation, "iou threshold must be in (0, 1]");
  }
  MatchResult result;
  result.ref_count = ref.size();
  result.other_count = other.size();

  std::vector<MatchPair> candidates;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    for (std::size_t o = 0; o < other.size(); ++o) {
      if (ref[r].class_label != other[o].class_label) continue;
      const double v = iou(ref[r].bbox, other[o].bbox);
      if (v >= iou_threshold) candidates.push_back({r, o, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.ref != b.ref) return a.ref < b.ref;
    return a.other < b.other;
  });

  std::vector<bool> ref_used(ref.size(), false);
  std::vector<bool> other_used(other.size(), false);
  for (const MatchPair& c : candidates) {
    if (ref_used[c.ref] || other_used[c.other]) continue;
    ref_used[c.ref] = true;
    other_used[c.other] = true;
    result.pairs.push_back(c);
  }
  result.hits = result.pairs.size();
  return result;
}

double f1_score(const DetectionSet& ref, const DetectionSet& other, double iou_threshold) {
  if (ref.empty() && other.empty()) {
    // Still validate the threshold.
    match_detections(ref, other, iou_threshold);
    return 1.0;
  }
  const MatchResult m = match_detections(ref, other, iou_threshold);
  if (ref.empty() || other.empty()) return 0.0;
  const double precision = static_cast<double>(m.hits) / static_cast<double>(other.size());
  const double recall = static_cast<double>(m.hits) / static_cast<double>(ref.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double frame_distance(const DetectionLog& log, std::size_t i, std::size_t j, double iou_threshold) {
  return 1.0 - f1_score(log.at(i), log.at(j), iou_threshold);
}

double skip_error(const DetectionLog& log, std::size_t i, std::size_t k, double iou_threshold) {
  if (i >= log.size() || k >= log.size() - i) {
    throw Error(ErrorCode::kRange, "skip of " + std::to_string(k) + " after frame " +
                                       std::to_string(i) + " overflows log of " +
                                       std::to_string(log.size()));
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= k; ++j) total += frame_distance(log, i, i + j, iou_threshold);
  return total;
}

double count_accuracy(const DetectionLog& log, const SkipTrace& trace) {
  if (trace.total_frames() != log.size()) {
    throw Error(ErrorCode::kRange, "trace covers " + std::to_string(trace.total_frames()) +
                                       " frames but log has " + std::to_string(log.size()));
  }
  if (log.empty()) return 1.0;
  const std::vector<std::size_t> sur = trace.surrogates();
  double sum = 0.0;
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto c_ref = static_cast<double>(log.at(t).size());
    const auto c_sur = static_cast<double>(log.at(sur[t]).size());
    sum += 1.0 - std::abs(c_ref - c_sur) / std::max({c_ref, c_sur, 1.0});
  }
  return sum / static_cast<double>(log.size());
}

}  // namespace fhop
