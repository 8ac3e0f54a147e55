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
#ifndef FHOP_FRAME_IO_HPP_
#define FHOP_FRAME_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fhop {

// Grayscale raster. Immutable once built.
class Frame {
 public:
  Frame() = default;
  // Throws kDimension if pixels.size() != width * height.
  Frame(std::size_t index, int width, int height, std::vector<std::uint8_t> pixels);

  std::size_t index() const { return index_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  Frame with_index(std::size_t index) const;

 private:
  std::size_t index_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct BBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  bool valid() const;
  double area() const { return (x2 - x1) * (y2 - y1); }
  bool operator==(const BBox&) const = default;
};

struct Detection {
  BBox bbox;
  std::string class_label;
  double score = 1.0;

  bool operator==(const Detection&) const = default;
};

using DetectionSet = std::vector<Detection>;

// Per-frame detection sets covering frames [0, size()).
class DetectionLog {
 public:
  DetectionLog() = default;
  // Every detection is validated; throws kValidation on a bad box, label or score.
  explicit DetectionLog(std::vector<DetectionSet> frames);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  // Throws kRange when out of range.
  const DetectionSet& at(std::size_t frame) const;
  const std::vector<DetectionSet>& frames() const { return frames_; }

  // Frames [begin, end) re-indexed from 0.
  DetectionLog slice(std::size_t begin, std::size_t end) const;

  bool operator==(const DetectionLog&) const = default;

 private:
  std::vector<DetectionSet> frames_;
};

// Luma weights used for every color decode.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Loads a directory of zero-padded frame files (.pgm, .ppm, and .png when
// built with libpng). When downscale_max_side is set, frames larger than it
// are shrunk by nearest-neighbor sampling keeping the aspect ratio.
std::vector<Frame> load_frames(const std::filesystem::path& directory,
                               std::optional<int> downscale_max_side = std::nullopt);

Frame decode_frame_file(const std::filesystem::path& file, std::size_t index);
Frame downscale_nearest(const Frame& frame, int max_side);
void write_frame_pgm(const Frame& frame, const std::filesystem::path& file);

DetectionLog read_detection_log(const std::filesystem::path& path);
DetectionLog parse_detection_log(const std::string& text);
void write_detection_log(const DetectionLog& log, const std::filesystem::path& path);
std::string format_detection_log(const DetectionLog& log);

}  // namespace fhop

#endif  // FHOP_FRAME_IO_HPP_
