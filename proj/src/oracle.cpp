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
#include "fhop/oracle.hpp"

#include <algorithm>
#include <limits>

#include "fhop/error.hpp"

namespace fhop {

void OracleConfig::validate() const {
  if (!(theta > 0 && theta < 1)) throw Error(ErrorCode::kValidation, "theta must be in (0, 1)");
  if (k_max < 1) throw Error(ErrorCode::kValidation, "k_max must be >= 1");
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw Error(ErrorCode::kValidation, "iou_threshold must be in (0, 1]");
  }
}

SkipTrace oracle_select(const DetectionLog& log, const OracleConfig& cfg) {
  cfg.validate();
  const std::size_t n = log.size();
  if (n == 0) throw Error(ErrorCode::kEmpty, "oracle needs a non-empty detection log");
  const auto k_max = static_cast<std::size_t>(cfg.k_max);

  // best[i]: fewest processed frames covering [i, n) when frame i is processed.
  std::vector<std::size_t> best(n + 1, 0);
  std::vector<std::size_t> choice(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    std::size_t best_count = std::numeric_limits<std::size_t>::max();
    std::size_t best_k = 0;
    const std::size_t limit = std::min(k_max, n - 1 - i);
    for (std::size_t k = 0; k <= limit; ++k) {
      // Skipping k frames needs frame i+k within theta; larger k only adds frames.
      if (k > 0 && frame_distance(log, i, i + k, cfg.iou_threshold) > cfg.theta) break;
      const std::size_t count = 1 + best[i + k + 1];
      if (count <= best_count) {
        best_count = count;
        best_k = k;
      }
    }
    best[i] = best_count;
    choice[i] = best_k;
  }

  SkipTrace::Builder builder(n);
  while (!builder.done()) builder.process(choice[builder.next_index()]);
  return std::move(builder).build();
}

bool is_feasible(const SkipTrace& trace, const DetectionLog& log, double theta,
                 double iou_threshold) {
  if (trace.total_frames() != log.size()) {
    throw Error(ErrorCode::kRange, "trace covers " + std::to_string(trace.total_frames()) +
                                       " frames but log has " + std::to_string(log.size()));
  }
  for (const TraceEntry& e : trace.entries()) {
    for (std::size_t j = 1; j <= e.skip_length; ++j) {
      if (frame_distance(log, e.processed_index, e.processed_index + j, iou_threshold) > theta) {
        return false;
      }
    }
  }
  return true;
}

SkipTrace fixed_skip(std::size_t n_frames, std::size_t k) {
  SkipTrace::Builder builder(n_frames);
  while (!builder.done()) builder.process(k);
  return std::move(builder).build();
}

SkipTrace diff_threshold_baseline(std::span<const Frame> frames, double tau, int k_max,
                                  const StateConfig& cfg) {
  if (k_max < 0) throw Error(ErrorCode::kValidation, "k_max must be >= 0");
  if (!(tau >= 0)) throw Error(ErrorCode::kValidation, "tau must be >= 0");
  std::vector<TraceEntry> entries;
  if (frames.empty()) return SkipTrace(std::move(entries), 0);
  entries.push_back({0, 0});
  for (std::size_t t = 1; t < frames.size(); ++t) {
    TraceEntry& last = entries.back();
    const bool capped = last.skip_length >= static_cast<std::size_t>(k_max);
    const bool changed =
        whole_diff_feature(frames[last.processed_index], frames[t], cfg).values[0] >= tau;
    if (capped || changed) {
      entries.push_back({t, 0});
    } else {
      ++last.skip_length;
    }
  }
  return SkipTrace(std::move(entries), frames.size());
}

}  // namespace fhop
