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
#ifndef FHOP_EVAL_HPP_
#define FHOP_EVAL_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fhop/detection_metrics.hpp"
#include "fhop/skip_trace.hpp"
#include "fhop/threshold_select.hpp"

namespace fhop {

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct Split {
  Range train;
  Range test;
};

// Training prefix of floor(fraction * n) frames, the rest for testing. Both
// parts must hold more than k_max frames.
Split split(std::size_t n, double fraction, int k_max);

struct EvalReport {
  std::string strategy;
  double theta = 0;
  double target_f1 = 0;
  double fraction_processed = 0;
  double fraction_filtered = 0;
  double error_per_skipped_frame = 0;
  double achieved_f1 = 0;          // mean over all frames, processed frames count 1
  double achieved_f1_skipped = 0;  // mean over skipped frames only, 1 if none
  double count_accuracy = 0;
  std::size_t frames_total = 0;
  std::size_t frames_processed = 0;
  std::optional<bool> feasible;  // every skipped frame within theta; set when theta is known
};

EvalReport evaluate(const SkipTrace& trace, const DetectionLog& log,
                    double iou_threshold = kDefaultIouThreshold,
                    std::optional<double> theta = std::nullopt);

std::string format_reports_csv(const std::vector<EvalReport>& reports);
std::string format_reports_table(const std::vector<EvalReport>& reports);

std::string format_sweep_csv(const SweepResult& result);
std::string format_sweep_table(const SweepResult& result);

}  // namespace fhop

#endif  // FHOP_EVAL_HPP_
