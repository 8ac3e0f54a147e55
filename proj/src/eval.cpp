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
#include "fhop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fhop/error.hpp"
#include "fhop/oracle.hpp"

namespace fhop {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string feasible_text(const std::optional<bool>& f) {
  if (!f) return "";
  return *f ? "yes" : "no";
}

using Row = std::vector<std::string>;

std::string csv(const std::vector<Row>& rows) {
  std::string out;
  for (const Row& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  }
  return out;
}

// Left-aligned first column, right-aligned rest.
std::string table(const std::vector<Row>& rows) {
  std::vector<std::size_t> width;
  for (const Row& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const Row& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += "  ";
      const std::string pad(width[i] - r[i].size(), ' ');
      line += i == 0 ? r[i] + pad : pad + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::vector<Row> report_rows(const std::vector<EvalReport>& reports) {
  std::vector<Row> rows{{"strategy", "theta", "target_f1", "fraction_processed",
                         "fraction_filtered", "error_per_skipped_frame", "achieved_f1",
                         "achieved_f1_skipped", "count_accuracy", "frames_total",
                         "frames_processed", "feasible"}};
  for (const EvalReport& r : reports) {
    rows.push_back({r.strategy, fixed(r.theta, 4), fixed(r.target_f1, 4),
                    fixed(r.fraction_processed), fixed(r.fraction_filtered),
                    fixed(r.error_per_skipped_frame), fixed(r.achieved_f1),
                    fixed(r.achieved_f1_skipped), fixed(r.count_accuracy),
                    std::to_string(r.frames_total), std::to_string(r.frames_processed),
                    feasible_text(r.feasible)});
  }
  return rows;
}

std::vector<Row> sweep_rows(const SweepResult& result) {
  std::vector<Row> rows{{"theta", "fraction_processed", "error_per_skipped", "objective", "best"}};
  for (const SweepPoint& p : result.points) {
    rows.push_back({fixed(p.theta, 4), fixed(p.fraction_processed), fixed(p.error_per_skipped),
                    fixed(p.objective), p.theta == result.best_theta ? "*" : ""});
  }
  return rows;
}

}  // namespace

Split split(std::size_t n, double fraction, int k_max) {
  if (!(fraction > 0 && fraction < 1)) {
    throw Error(ErrorCode::kValidation, "split fraction must be in (0, 1)");
  }
  if (k_max < 0) throw Error(ErrorCode::kValidation, "k_max must be >= 0");
  const auto train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  const auto need = static_cast<std::size_t>(k_max) + 1;
  if (train < need || n - train < need) {
    throw Error(ErrorCode::kRange, "split of " + std::to_string(n) + " frames at " +
                                       fixed(fraction, 3) + " leaves " + std::to_string(train) +
                                       "/" + std::to_string(n - train) +
                                       " frames; each part needs more than k_max=" +
                                       std::to_string(k_max));
  }
  return Split{{0, train}, {train, n}};
}

EvalReport evaluate(const SkipTrace& trace, const DetectionLog& log, double iou_threshold,
                    std::optional<double> theta) {
  if (trace.total_frames() != log.size()) {
    throw Error(ErrorCode::kRange, "trace covers " + std::to_string(trace.total_frames()) +
                                       " frames but log has " + std::to_string(log.size()));
  }
  if (log.empty()) throw Error(ErrorCode::kEmpty, "cannot evaluate an empty log");
  EvalReport r;
  r.frames_total = trace.total_frames();
  r.frames_processed = trace.processed_count();
  r.fraction_processed = trace.fraction_processed();
  r.fraction_filtered = 1.0 - r.fraction_processed;
  r.error_per_skipped_frame = error_per_skipped_frame(trace, log, iou_threshold);
  r.count_accuracy = count_accuracy(log, trace);

  const std::vector<std::size_t> sur = trace.surrogates();
  double all = 0.0;
  double skipped = 0.0;
  for (std::size_t t = 0; t < log.size(); ++t) {
    if (sur[t] == t) {
      all += 1.0;
      continue;
    }
    const double f = f1_score(log.at(t), log.at(sur[t]), iou_threshold);
    all += f;
    skipped += f;
  }
  const std::size_t n_skipped = r.frames_total - r.frames_processed;
  r.achieved_f1 = all / static_cast<double>(r.frames_total);
  r.achieved_f1_skipped = n_skipped == 0 ? 1.0 : skipped / static_cast<double>(n_skipped);
  if (theta) {
    r.theta = *theta;
    r.feasible = is_feasible(trace, log, *theta, iou_threshold);
  }
  return r;
}

std::string format_reports_csv(const std::vector<EvalReport>& reports) {
  return csv(report_rows(reports));
}

std::string format_reports_table(const std::vector<EvalReport>& reports) {
  return table(report_rows(reports));
}

std::string format_sweep_csv(const SweepResult& result) { return csv(sweep_rows(result)); }

std::string format_sweep_table(const SweepResult& result) { return table(sweep_rows(result)); }

}  // namespace fhop
