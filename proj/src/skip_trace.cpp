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
#include "fhop/skip_trace.hpp"

#include <fstream>
#include <sstream>

#include "fhop/error.hpp"

namespace fhop {

SkipTrace::SkipTrace(std::vector<TraceEntry> entries, std::size_t total_frames)
    : entries_(std::move(entries)), total_(total_frames) {
  if (total_ == 0) {
    if (!entries_.empty()) throw Error(ErrorCode::kValidation, "trace over zero frames has entries");
    return;
  }
  if (entries_.empty() || entries_.front().processed_index != 0) {
    throw Error(ErrorCode::kValidation, "trace must start by processing frame 0");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::size_t end = entries_[i].processed_index + entries_[i].skip_length + 1;
    const bool last = i + 1 == entries_.size();
    if (!last && entries_[i + 1].processed_index != end) {
      throw Error(ErrorCode::kValidation,
                  "trace entry " + std::to_string(i + 1) + " at frame " +
                      std::to_string(entries_[i + 1].processed_index) + ", expected " +
                      std::to_string(end));
    }
    if (last && end != total_) {
      throw Error(ErrorCode::kValidation, "trace covers " + std::to_string(end) + " frames, expected " +
                                              std::to_string(total_));
    }
  }
}

void SkipTrace::Builder::process(std::size_t requested_skip) {
  if (done()) throw Error(ErrorCode::kRange, "trace already covers every frame");
  const std::size_t remaining = total_ - next_ - 1;
  const std::size_t skip = std::min(requested_skip, remaining);
  entries_.push_back({next_, skip});
  next_ += skip + 1;
}

SkipTrace SkipTrace::Builder::build() && { return SkipTrace(std::move(entries_), total_); }

double SkipTrace::fraction_processed() const {
  return total_ == 0 ? 0.0 : static_cast<double>(entries_.size()) / static_cast<double>(total_);
}

std::vector<std::size_t> SkipTrace::processed_indices() const {
  std::vector<std::size_t> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.processed_index);
  return out;
}

std::vector<std::size_t> SkipTrace::surrogates() const {
  std::vector<std::size_t> out(total_);
  for (const auto& e : entries_) {
    for (std::size_t j = 0; j <= e.skip_length; ++j) out[e.processed_index + j] = e.processed_index;
  }
  return out;
}

std::string format_trace(const SkipTrace& trace) {
  std::ostringstream out;
  out << "# total_frames=" << trace.total_frames() << "\n";
  out << "processed_index,skip_length\n";
  for (const auto& e : trace.entries()) out << e.processed_index << ',' << e.skip_length << '\n';
  return out.str();
}

SkipTrace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  long long total = -1;
  std::vector<TraceEntry> entries;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParse, "trace line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# total_frames=", 0) == 0) {
      try {
        total = std::stoll(line.substr(15));
      } catch (const std::exception&) {
        fail("bad total_frames");
      }
      if (total < 0) fail("negative total_frames");
      continue;
    }
    if (line[0] == '#' || line == "processed_index,skip_length") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected processed_index,skip_length");
    try {
      std::size_t used_a = 0;
      std::size_t used_b = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const long long idx = std::stoll(a, &used_a);
      const long long skip = std::stoll(b, &used_b);
      if (used_a != a.size() || used_b != b.size() || idx < 0 || skip < 0) throw std::invalid_argument("");
      entries.push_back({static_cast<std::size_t>(idx), static_cast<std::size_t>(skip)});
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("non-integer field");
    }
  }
  if (total < 0) throw Error(ErrorCode::kParse, "trace missing '# total_frames=' header");
  return SkipTrace(std::move(entries), static_cast<std::size_t>(total));
}

void write_trace(const SkipTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write trace " + path.string());
  out << format_trace(trace);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

SkipTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trace " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

}  // namespace fhop
