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
#ifndef FHOP_SYNTH_HPP_
#define FHOP_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fhop/frame_io.hpp"

namespace fhop {

struct SceneObject {
  std::string class_label = "object";
  double w = 10;
  double h = 10;
  double x0 = 0;  // top-left at spawn_frame
  double y0 = 0;
  double vx = 0;  // px per frame
  double vy = 0;
  std::size_t spawn_frame = 0;
  long despawn_frame = -1;  // exclusive; -1 never
  int intensity = 100;      // added to the background
  int blink_period = 0;     // visible for blink_period frames, hidden for the next blink_period; 0 off
};

struct SceneSpec {
  int width = 160;
  int height = 120;
  std::size_t n_frames = 1200;
  double fps = 30;
  std::vector<SceneObject> objects;
  int background = 40;
  int noise_amplitude = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  std::vector<Frame> frames;
  DetectionLog log;
};

// Object box in frame t clipped to the raster; empty box when hidden, not
// yet spawned, despawned or fully outside.
BBox object_box(const SceneSpec& spec, const SceneObject& obj, std::size_t t);

// Pixels whose centers fall inside a box are painted; later objects overwrite
// earlier ones.
Scene generate_scene(const SceneSpec& spec);

std::vector<std::string> preset_names();

// n_frames 0 keeps the preset's default length.
SceneSpec preset(const std::string& name, std::size_t n_frames = 0, std::uint64_t seed = 0);

}  // namespace fhop

#endif  // FHOP_SYNTH_HPP_
