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
#include <cstring>

#include "doctest.h"
#include "fhop/agent.hpp"
#include "fhop/error.hpp"
#include "fhop/synth.hpp"
#include "test_util.hpp"

using namespace fhop;
using testing::code_of;

namespace {

AgentArtifact random_artifact(Rng& rng, std::size_t states, std::size_t actions) {
  AgentArtifact a;
  a.config_fingerprint = rng.next();
  a.state_config.k = static_cast<int>(states);
  std::vector<double> cents(states * 9);
  for (double& v : cents) v = rng.uniform();
  std::vector<double> q(states * actions);
  for (double& v : q) v = (rng.uniform() - 0.5) * 1e3;
  a.state_model = StateModel(FeatureVariant::kChunk, 9, std::move(cents), 1234);
  a.q_table = QTable(states, actions, std::move(q));
  a.frame_width = 64;
  a.frame_height = 48;
  return a;
}

void same_artifact(const AgentArtifact& a, const AgentArtifact& b) {
  CHECK(a.format_version == b.format_version);
  CHECK(a.config_fingerprint == b.config_fingerprint);
  CHECK(a.state_model.centroid_data() == b.state_model.centroid_data());
  CHECK(a.state_model.fitted_samples() == b.state_model.fitted_samples());
  CHECK(a.q_table == b.q_table);
  CHECK(a.frame_width == b.frame_width);
  CHECK(a.frame_height == b.frame_height);
  CHECK(a.state_config.variant == b.state_config.variant);
  CHECK(a.state_config.segment_seconds == b.state_config.segment_seconds);
}

}  // namespace

TEST_CASE("artifact round trip is bit exact") {
  Rng rng(1);
  testing::TempDir dir("agent");
  const AgentArtifact a = random_artifact(rng, 10, 31);
  save_agent(a, dir / "a.fhop");
  same_artifact(load_agent(dir / "a.fhop"), a);
  for (int i = 0; i < 20; ++i) {
    const AgentArtifact r = random_artifact(rng, 2 + rng.index(11), 2 + rng.index(40));
    same_artifact(deserialize_agent(serialize_agent(r)), r);
  }
}

TEST_CASE("damaged artifacts") {
  Rng rng(2);
  const std::string bytes = serialize_agent(random_artifact(rng, 10, 31));
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK(code_of([&] { deserialize_agent(bytes.substr(0, cut)); }) == ErrorCode::kCorrupt);
  }
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK(code_of([&] { deserialize_agent(flipped); }) == ErrorCode::kCorrupt);
  CHECK(code_of([&] { deserialize_agent(bytes + "x"); }) == ErrorCode::kCorrupt);

  std::string future = bytes;
  const std::uint32_t v = 7;
  std::memcpy(future.data() + 8, &v, sizeof v);
  CHECK(code_of([&] { deserialize_agent(future); }) == ErrorCode::kUnsupportedVersion);

  testing::TempDir dir("agent-bad");
  testing::spit(dir / "cut.fhop", bytes.substr(0, 100));
  CHECK(code_of([&] { load_agent(dir / "cut.fhop"); }) == ErrorCode::kCorrupt);
  CHECK(code_of([&] { load_agent(dir / "missing.fhop"); }) == ErrorCode::kIo);
}

TEST_CASE("invalid artifacts are refused on save") {
  Rng rng(3);
  AgentArtifact a = random_artifact(rng, 10, 31);
  a.q_table = QTable(9, 31);
  testing::TempDir dir("agent-save");
  CHECK(code_of([&] { save_agent(a, dir / "x.fhop"); }) == ErrorCode::kValidation);
  CHECK_FALSE(std::filesystem::exists(dir / "x.fhop"));
  AgentArtifact b = random_artifact(rng, 4, 5);
  b.state_config.variant = FeatureVariant::kWhole;
  CHECK(code_of([&] { serialize_agent(b); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { save_agent(random_artifact(rng, 2, 3), dir / "no" / "dir.fhop"); }) == ErrorCode::kIo);
}

TEST_CASE("fingerprint mismatch only warns") {
  Rng rng(4);
  testing::TempDir dir("agent-fp");
  AgentArtifact a = random_artifact(rng, 3, 4);
  a.config_fingerprint = 42;
  save_agent(a, dir / "a.fhop");
  std::vector<std::string> warnings;
  const WarningSink sink = [&](const std::string& m) { warnings.push_back(m); };
  load_agent(dir / "a.fhop", 42, sink);
  CHECK(warnings.empty());
  const AgentArtifact loaded = load_agent(dir / "a.fhop", 43, sink);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("fingerprint") != std::string::npos);
  CHECK(loaded.q_table == a.q_table);
}

TEST_CASE("config fingerprint covers the training configuration") {
  const StateConfig s;
  const RLConfig r;
  const std::uint64_t base = config_fingerprint(s, r, 1);
  CHECK(base == config_fingerprint(s, r, 1));
  CHECK(base != config_fingerprint(s, r, 2));
  RLConfig r2 = r;
  r2.theta = 0.25;
  CHECK(base != config_fingerprint(s, r2, 1));
  StateConfig s2 = s;
  s2.grid_cols = 4;
  CHECK(base != config_fingerprint(s2, r, 1));
}

TEST_CASE("train and run an agent end to end") {
  const Scene scene = generate_scene(preset("static", 200, 3));
  StateConfig sc;
  RLConfig rc;
  const AgentArtifact a = train_agent(scene.frames, scene.log, sc, rc, 9);
  CHECK(a.q_table.states() == 10);
  CHECK(a.k_max() == 30);
  CHECK(a.frame_width == 160);
  CHECK(a.config_fingerprint == config_fingerprint(sc, rc, 9));
  const AgentArtifact again = train_agent(scene.frames, scene.log, sc, rc, 9);
  CHECK(again.q_table == a.q_table);
  CHECK(again.state_model.centroid_data() == a.state_model.centroid_data());

  const SkipTrace t = run_agent(scene.frames, a);
  CHECK(t.processed_indices() == std::vector<std::size_t>{0, 31, 62, 93, 124, 155, 186});
  CHECK(code_of([&] { run_agent_on_detections(scene.log, a); }) == ErrorCode::kValidation);

  std::vector<Frame> small;
  for (int i = 0; i < 5; ++i) small.push_back(testing::flat_frame(static_cast<std::size_t>(i), 80, 60, 0));
  CHECK(code_of([&] { run_agent(small, a); }) == ErrorCode::kDimension);
  CHECK(code_of([&] { train_agent(scene.frames, DetectionLog(std::vector<DetectionSet>(150)), sc, rc, 1); }) ==
        ErrorCode::kRange);
}

TEST_CASE("detection-state agents need no frames") {
  const Scene scene = generate_scene(preset("static", 120, 3));
  StateConfig sc;
  sc.variant = FeatureVariant::kDetection;
  RLConfig rc;
  const AgentArtifact a = train_agent({}, scene.log, sc, rc, 2);
  CHECK(a.frame_width == 0);
  CHECK(a.state_model.dimension() == 2);
  const SkipTrace t = run_agent_on_detections(scene.log, a);
  CHECK(t.processed_count() == 4);
  CHECK(code_of([&] { run_agent(scene.frames, a); }) == ErrorCode::kValidation);
  same_artifact(deserialize_agent(serialize_agent(a)), a);
}
