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
#include "fhop/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fhop/error.hpp"
#include "json.hpp"

#ifdef FHOP_HAVE_PNG
#include <png.h>
#endif

namespace fhop {

namespace fs = std::filesystem;

Frame::Frame(std::size_t index, int width, int height, std::vector<std::uint8_t> pixels)
    : index_(index), width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kDimension,
                "frame " + std::to_string(index) + ": pixel count " + std::to_string(pixels_.size()) +
                    " does not match " + std::to_string(width) + "x" + std::to_string(height));
  }
}

Frame Frame::with_index(std::size_t index) const {
  Frame copy = *this;
  copy.index_ = index;
  return copy;
}

bool BBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 < x2 && y1 < y2;
}

namespace {

void validate_detection(const Detection& d, std::size_t frame) {
  const std::string where = "frame " + std::to_string(frame) + ": ";
  if (!d.bbox.valid()) {
    throw Error(ErrorCode::kValidation, where + "bbox violates x1 < x2, y1 < y2 (finite)");
  }
  if (d.class_label.empty()) {
    throw Error(ErrorCode::kValidation, where + "empty class label");
  }
  if (!(d.score >= 0.0 && d.score <= 1.0)) {
    throw Error(ErrorCode::kValidation, where + "score outside [0, 1]");
  }
}

}  // namespace

DetectionLog::DetectionLog(std::vector<DetectionSet> frames) : frames_(std::move(frames)) {
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    for (const Detection& d : frames_[i]) validate_detection(d, i);
  }
}

const DetectionSet& DetectionLog::at(std::size_t frame) const {
  if (frame >= frames_.size()) {
    throw Error(ErrorCode::kRange, "frame index " + std::to_string(frame) +
                                       " outside detection log of " +
                                       std::to_string(frames_.size()) + " frames");
  }
  return frames_[frame];
}

DetectionLog DetectionLog::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > frames_.size()) {
    throw Error(ErrorCode::kRange, "slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                       ") outside log of " + std::to_string(frames_.size()));
  }
  DetectionLog out;
  out.frames_.assign(frames_.begin() + static_cast<std::ptrdiff_t>(begin),
                     frames_.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255L, std::lround(y)));
}

// ---------------------------------------------------------------------------
// Raster decoding

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool supported_extension(const std::string& ext) {
  const std::string e = lower(ext);
#ifdef FHOP_HAVE_PNG
  if (e == ".png") return true;
#endif
  return e == ".pgm" || e == ".ppm" || e == ".pnm";
}

[[noreturn]] void decode_error(const fs::path& file, const std::string& what) {
  throw Error(ErrorCode::kDecode, "cannot decode " + file.string() + ": " + what);
}

// Netpbm header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

int parse_positive(const std::string& token, const fs::path& file, const char* field) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size() || v <= 0 || v > (1L << 24)) throw std::invalid_argument(field);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    decode_error(file, std::string("bad ") + field + " '" + token + "'");
  }
}

Frame decode_netpbm(const fs::path& file, std::size_t index) {
  std::ifstream in(file, std::ios::binary);
  if (!in) decode_error(file, "unreadable");
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    decode_error(file, "unsupported netpbm magic '" + magic + "'");
  }
  const bool color = magic == "P3" || magic == "P6";
  const bool binary = magic == "P5" || magic == "P6";
  const int width = parse_positive(next_token(in), file, "width");
  const int height = parse_positive(next_token(in), file, "height");
  const int maxval = parse_positive(next_token(in), file, "maxval");
  if (maxval > 65535) decode_error(file, "maxval above 65535");

  const std::size_t count = static_cast<std::size_t>(width) * height * (color ? 3 : 1);
  std::vector<int> samples(count);
  if (binary) {
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) decode_error(file, "truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      samples[i] = bytes_per == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) decode_error(file, "truncated raster");
      try {
        samples[i] = std::stoi(tok);
      } catch (const std::exception&) {
        decode_error(file, "bad sample '" + tok + "'");
      }
    }
  }
  auto scale = [maxval](int v) {
    v = std::clamp(v, 0, maxval);
    if (maxval == 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
  };
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    pixels[p] = color ? luma(scale(samples[3 * p]), scale(samples[3 * p + 1]),
                             scale(samples[3 * p + 2]))
                      : scale(samples[p]);
  }
  return Frame(index, width, height, std::move(pixels));
}

#ifdef FHOP_HAVE_PNG
Frame decode_png(const fs::path& file, std::size_t index) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, file.string().c_str())) {
    decode_error(file, image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    decode_error(file, image.message);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    pixels[p] = luma(rgb[3 * p], rgb[3 * p + 1], rgb[3 * p + 2]);
  }
  return Frame(index, width, height, std::move(pixels));
}
#endif

}  // namespace

Frame decode_frame_file(const fs::path& file, std::size_t index) {
#ifdef FHOP_HAVE_PNG
  if (lower(file.extension().string()) == ".png") return decode_png(file, index);
#endif
  return decode_netpbm(file, index);
}

Frame downscale_nearest(const Frame& frame, int max_side) {
  if (max_side <= 0) throw Error(ErrorCode::kValidation, "downscale target must be positive");
  const int w = frame.width();
  const int h = frame.height();
  if (std::max(w, h) <= max_side) return frame;
  const double scale = static_cast<double>(max_side) / std::max(w, h);
  const int nw = std::clamp(static_cast<int>(std::lround(w * scale)), 1, max_side);
  const int nh = std::clamp(static_cast<int>(std::lround(h * scale)), 1, max_side);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(nw) * nh);
  for (int y = 0; y < nh; ++y) {
    const int sy = std::min(h - 1, static_cast<int>((y + 0.5) * h / nh));
    for (int x = 0; x < nw; ++x) {
      const int sx = std::min(w - 1, static_cast<int>((x + 0.5) * w / nw));
      out[static_cast<std::size_t>(y) * nw + x] = frame.at(sx, sy);
    }
  }
  return Frame(frame.index(), nw, nh, std::move(out));
}

std::vector<Frame> load_frames(const fs::path& directory, std::optional<int> downscale_max_side) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::kIo, "frame directory not found: " + directory.string());
  }
  std::map<std::size_t, fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    const std::string stem = p.stem().string();
    if (!supported_extension(p.extension().string()) || stem.empty() ||
        !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    const std::size_t index = std::stoull(stem);
    auto [it, inserted] = files.emplace(index, p);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicate, "frame index " + std::to_string(index) + " appears twice: " +
                                             it->second.filename().string() + ", " +
                                             p.filename().string());
    }
  }
  if (files.empty()) {
    throw Error(ErrorCode::kEmpty, "no frame files in " + directory.string());
  }
  std::vector<Frame> frames;
  frames.reserve(files.size());
  std::size_t expected = 0;
  for (const auto& [index, path] : files) {
    if (index != expected) {
      throw Error(ErrorCode::kGap, "frame sequence gap: missing index " + std::to_string(expected) +
                                       " in " + directory.string());
    }
    Frame f = decode_frame_file(path, index);
    if (downscale_max_side) f = downscale_nearest(f, *downscale_max_side);
    if (!frames.empty() &&
        (f.width() != frames.front().width() || f.height() != frames.front().height())) {
      throw Error(ErrorCode::kDimension, path.filename().string() + " is " +
                                             std::to_string(f.width()) + "x" +
                                             std::to_string(f.height()) + ", sequence is " +
                                             std::to_string(frames.front().width()) + "x" +
                                             std::to_string(frames.front().height()));
    }
    frames.push_back(std::move(f));
    ++expected;
  }
  return frames;
}

void write_frame_pgm(const Frame& frame, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  const auto px = frame.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + file.string());
}

// ---------------------------------------------------------------------------
// Detection logs

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "detection log line " + std::to_string(line) + ": " + what);
}

Detection parse_detection(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) parse_error(line, "detection is not an object");
  Detection d;
  const auto bbox = j.find("bbox");
  if (bbox == j.end() || !bbox->is_array() || bbox->size() != 4) {
    parse_error(line, "bbox must be an array [x1, y1, x2, y2]");
  }
  for (const auto& v : *bbox) {
    if (!v.is_number()) parse_error(line, "bbox coordinates must be numbers");
  }
  d.bbox = {(*bbox)[0].get<double>(), (*bbox)[1].get<double>(), (*bbox)[2].get<double>(),
            (*bbox)[3].get<double>()};
  if (!d.bbox.valid()) parse_error(line, "bbox violates invariant x1 < x2, y1 < y2");
  const auto cls = j.find("class");
  if (cls == j.end() || !cls->is_string() || cls->get<std::string>().empty()) {
    parse_error(line, "class must be a non-empty string");
  }
  d.class_label = cls->get<std::string>();
  const auto score = j.find("score");
  if (score == j.end() || !score->is_number()) parse_error(line, "score must be a number");
  d.score = score->get<double>();
  if (!(d.score >= 0.0 && d.score <= 1.0)) parse_error(line, "score outside [0, 1]");
  return d;
}

}  // namespace

DetectionLog parse_detection_log(const std::string& text) {
  std::map<std::size_t, DetectionSet> by_frame;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (std::all_of(raw.begin(), raw.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      parse_error(line_no, std::string("invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) parse_error(line_no, "record is not an object");
    const auto frame = j.find("frame");
    if (frame == j.end() || !frame->is_number_integer() || frame->get<long long>() < 0) {
      parse_error(line_no, "frame must be a non-negative integer");
    }
    const auto dets = j.find("detections");
    if (dets == j.end() || !dets->is_array()) parse_error(line_no, "detections must be an array");
    DetectionSet set;
    set.reserve(dets->size());
    for (const auto& d : *dets) set.push_back(parse_detection(d, line_no));
    const auto index = static_cast<std::size_t>(frame->get<long long>());
    if (!by_frame.emplace(index, std::move(set)).second) {
      throw Error(ErrorCode::kDuplicate, "detection log line " + std::to_string(line_no) +
                                             ": duplicate frame " + std::to_string(index));
    }
  }
  std::vector<DetectionSet> frames;
  frames.reserve(by_frame.size());
  for (auto& [index, set] : by_frame) {
    if (index != frames.size()) {
      throw Error(ErrorCode::kGap,
                  "detection log gap: missing frame " + std::to_string(frames.size()));
    }
    frames.push_back(std::move(set));
  }
  return DetectionLog(std::move(frames));
}

DetectionLog read_detection_log(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open detection log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_detection_log(buf.str());
}

std::string format_detection_log(const DetectionLog& log) {
  std::string out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    nlohmann::ordered_json rec;
    rec["frame"] = i;
    rec["detections"] = nlohmann::ordered_json::array();
    for (const Detection& d : log.at(i)) {
      nlohmann::ordered_json jd;
      jd["bbox"] = {d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2};
      jd["class"] = d.class_label;
      jd["score"] = d.score;
      rec["detections"].push_back(std::move(jd));
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_detection_log(const DetectionLog& log, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write detection log " + path.string());
  out << format_detection_log(log);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace fhop
