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
#include "fhop/synth.hpp"

#include <algorithm>
#include <cmath>

#include "fhop/error.hpp"
#include "fhop/rng.hpp"

namespace fhop {

namespace {

constexpr std::size_t kDefaultFrames = 1200;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool visible(const SceneObject& obj, std::size_t t) {
  if (t < obj.spawn_frame) return false;
  if (obj.despawn_frame >= 0 && t >= static_cast<std::size_t>(obj.despawn_frame)) return false;
  if (obj.blink_period > 0) {
    const std::size_t phase = (t - obj.spawn_frame) / static_cast<std::size_t>(obj.blink_period);
    if (phase % 2 != 0) return false;
  }
  return true;
}

SceneObject lane_object(const std::string& label, double w, double h, double x0, double y0,
                        double vx, std::size_t spawn, long life, int intensity) {
  SceneObject o;
  o.class_label = label;
  o.w = w;
  o.h = h;
  o.x0 = x0;
  o.y0 = y0;
  o.vx = vx;
  o.spawn_frame = spawn;
  o.despawn_frame = static_cast<long>(spawn) + life;
  o.intensity = intensity;
  return o;
}

SceneSpec static_scene() {
  SceneSpec s;
  for (int i = 0; i < 3; ++i) {
    SceneObject o;
    o.class_label = i == 1 ? "person" : "car";
    o.w = 30;
    o.h = 20;
    o.x0 = 10 + 50 * i;
    o.y0 = 20 + 30 * i;
    o.intensity = 80 + 30 * i;
    s.objects.push_back(o);
  }
  return s;
}

// 40x30 boxes at 1 px/frame; each lane relaunches every 100 frames.
SceneSpec drift_slow(std::size_t n) {
  SceneSpec s;
  for (int lane = 0; lane < 3; ++lane) {
    for (std::size_t start = static_cast<std::size_t>(lane) * 33; start < n; start += 100) {
      s.objects.push_back(
          lane_object("car", 40, 30, 5, 5 + 38.0 * lane, 1, start, 110, 90 + 20 * lane));
    }
  }
  return s;
}

// 20x16 boxes at 8 px/frame; consecutive boxes never reach IoU 0.5.
SceneSpec drift_fast(std::size_t n) {
  SceneSpec s;
  for (int lane = 0; lane < 2; ++lane) {
    for (std::size_t start = static_cast<std::size_t>(lane) * 6; start < n; start += 12) {
      s.objects.push_back(
          lane_object("car", 20, 16, 4, 20 + 50.0 * lane, 8, start, 16, 100 + 40 * lane));
    }
  }
  return s;
}

SceneSpec strobe() {
  SceneSpec s = static_scene();
  for (SceneObject& o : s.objects) o.blink_period = 1;
  return s;
}

// Three parked cars; now and then one to three people cross below them.
SceneSpec burst(std::size_t n, std::uint64_t seed) {
  SceneSpec s;
  for (int i = 0; i < 3; ++i) {
    SceneObject o;
    o.class_label = "car";
    o.w = 30;
    o.h = 20;
    o.x0 = 10 + 50 * i;
    o.y0 = 8;
    o.intensity = 90;
    s.objects.push_back(o);
  }
  Rng rng(mix(seed ^ 0x6275727374ULL));
  std::size_t t = 40 + rng.index(60);
  while (t < n) {
    const std::size_t movers = 1 + rng.index(3);
    for (std::size_t m = 0; m < movers; ++m) {
      s.objects.push_back(lane_object("person", 16, 12, 2, 40 + 25.0 * static_cast<double>(m), 7,
                                      t + 2 * m, 20, 120 + 30 * static_cast<int>(m)));
    }
    t += 70 + rng.index(90);
  }
  return s;
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kValidation, "scene size must be positive");
  if (n_frames < 1) throw Error(ErrorCode::kValidation, "scene needs at least one frame");
  if (!(fps > 0)) throw Error(ErrorCode::kValidation, "fps must be positive");
  if (background < 0 || background > 255) {
    throw Error(ErrorCode::kValidation, "background must be in [0, 255]");
  }
  if (noise_amplitude < 0 || noise_amplitude > 255) {
    throw Error(ErrorCode::kValidation, "noise_amplitude must be in [0, 255]");
  }
  for (const SceneObject& o : objects) {
    if (!(o.w > 0 && o.h > 0)) throw Error(ErrorCode::kValidation, "object size must be positive");
    if (o.class_label.empty()) throw Error(ErrorCode::kValidation, "object class_label is empty");
    if (o.blink_period < 0) throw Error(ErrorCode::kValidation, "blink_period must be >= 0");
    // Otherwise the logged box would cover pixels identical to the background.
    if (o.intensity == 0 || background + o.intensity < 0 || background + o.intensity > 255) {
      throw Error(ErrorCode::kValidation,
                  "object intensity must be nonzero and keep background + intensity in [0, 255]");
    }
    if (!std::isfinite(o.x0) || !std::isfinite(o.y0) || !std::isfinite(o.vx) ||
        !std::isfinite(o.vy)) {
      throw Error(ErrorCode::kValidation, "object position and velocity must be finite");
    }
  }
}

BBox object_box(const SceneSpec& spec, const SceneObject& obj, std::size_t t) {
  if (!visible(obj, t)) return {};
  const double dt = static_cast<double>(t - obj.spawn_frame);
  const double x = obj.x0 + obj.vx * dt;
  const double y = obj.y0 + obj.vy * dt;
  BBox b{std::max(x, 0.0), std::max(y, 0.0), std::min(x + obj.w, static_cast<double>(spec.width)),
         std::min(y + obj.h, static_cast<double>(spec.height))};
  if (!(b.x1 < b.x2 && b.y1 < b.y2)) return {};
  return b;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  std::vector<DetectionSet> sets(spec.n_frames);
  scene.frames.reserve(spec.n_frames);
  const auto w = static_cast<std::size_t>(spec.width);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    std::vector<int> raster(w * static_cast<std::size_t>(spec.height), spec.background);
    for (const SceneObject& o : spec.objects) {
      const BBox b = object_box(spec, o, t);
      if (!b.valid()) continue;
      sets[t].push_back({b, o.class_label, 1.0});
      const int px0 = static_cast<int>(std::ceil(b.x1 - 0.5));
      const int px1 = static_cast<int>(std::ceil(b.x2 - 0.5));
      const int py0 = static_cast<int>(std::ceil(b.y1 - 0.5));
      const int py1 = static_cast<int>(std::ceil(b.y2 - 0.5));
      for (int py = py0; py < py1; ++py) {
        for (int px = px0; px < px1; ++px) {
          raster[static_cast<std::size_t>(py) * w + static_cast<std::size_t>(px)] =
              spec.background + o.intensity;
        }
      }
    }
    std::vector<std::uint8_t> pixels(raster.size());
    if (spec.noise_amplitude > 0) {
      Rng rng(mix(spec.seed) ^ mix(t));
      const auto span = static_cast<std::size_t>(2 * spec.noise_amplitude + 1);
      for (int& v : raster) v += static_cast<int>(rng.index(span)) - spec.noise_amplitude;
    }
    std::transform(raster.begin(), raster.end(), pixels.begin(),
                   [](int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); });
    scene.frames.emplace_back(t, spec.width, spec.height, std::move(pixels));
  }
  scene.log = DetectionLog(std::move(sets));
  return scene;
}

std::vector<std::string> preset_names() {
  return {"static", "drift-slow", "drift-fast", "strobe", "burst"};
}

SceneSpec preset(const std::string& name, std::size_t n_frames, std::uint64_t seed) {
  const std::size_t n = n_frames == 0 ? kDefaultFrames : n_frames;
  SceneSpec s;
  if (name == "static") {
    s = static_scene();
  } else if (name == "drift-slow") {
    s = drift_slow(n);
  } else if (name == "drift-fast") {
    s = drift_fast(n);
  } else if (name == "strobe") {
    s = strobe();
  } else if (name == "burst") {
    s = burst(n, seed);
  } else {
    throw Error(ErrorCode::kValidation,
                "unknown preset '" + name +
                    "' (expected static, drift-slow, drift-fast, strobe or burst)");
  }
  s.n_frames = n;
  s.seed = seed;
  return s;
}

}  // namespace fhop
