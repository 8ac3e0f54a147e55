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
#ifndef FHOP_SKIP_TRACE_HPP_
#define FHOP_SKIP_TRACE_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace fhop {

struct TraceEntry {
  std::size_t processed_index = 0;
  std::size_t skip_length = 0;

  bool operator==(const TraceEntry&) const = default;
};

// Processed frames and the skip taken after each. The entries partition
// [0, total_frames): the first entry is frame 0, each next entry sits at
// previous + skip + 1, and the last skip is truncated so it ends at
// total_frames.
class SkipTrace {
 public:
  SkipTrace() = default;
  // Throws kValidation if the entries do not satisfy the invariant.
  SkipTrace(std::vector<TraceEntry> entries, std::size_t total_frames);

  // Builds a trace from requested skips, truncating the final one.
  class Builder {
   public:
    explicit Builder(std::size_t total_frames) : total_(total_frames) {}
    // Frame that will be processed next.
    std::size_t next_index() const { return next_; }
    bool done() const { return next_ >= total_; }
    void process(std::size_t requested_skip);
    SkipTrace build() &&;

   private:
    std::size_t total_;
    std::size_t next_ = 0;
    std::vector<TraceEntry> entries_;
  };

  const std::vector<TraceEntry>& entries() const { return entries_; }
  std::size_t total_frames() const { return total_; }
  std::size_t processed_count() const { return entries_.size(); }
  double fraction_processed() const;
  std::vector<std::size_t> processed_indices() const;
  // For every frame, the processed frame that stands in for it.
  std::vector<std::size_t> surrogates() const;

  bool operator==(const SkipTrace&) const = default;

 private:
  std::vector<TraceEntry> entries_;
  std::size_t total_ = 0;
};

// CSV form: "# total_frames=<N>", a column header, then one row per entry.
std::string format_trace(const SkipTrace& trace);
SkipTrace parse_trace(const std::string& text);
void write_trace(const SkipTrace& trace, const std::filesystem::path& path);
SkipTrace read_trace(const std::filesystem::path& path);

}  // namespace fhop

#endif  // FHOP_SKIP_TRACE_HPP_
