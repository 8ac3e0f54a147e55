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
#include <algorithm>

#include "doctest.h"
#include "fhop/error.hpp"
#include "fhop/pipeline.hpp"
#include "test_util.hpp"

using namespace fhop;
using testing::code_of;
using testing::slurp;
using testing::TempDir;

namespace {

RunConfig small_config(const TempDir& dir) {
  RunConfig cfg = parse_run_config(R"({"synth": {"preset": "burst", "n_frames": 240},
                                       "rl": {"epochs": 4}, "seed": 3})");
  cfg.frames = (dir / "frames").string();
  cfg.log = (dir / "detections.jsonl").string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d = parse_run_config("{}");
  CHECK(d.split == 0.5);
  CHECK(d.targets == std::vector<double>{0.7, 0.8, 0.9});
  CHECK(d.rl.k_max == 30);
  CHECK(d.oracle.k_max == 30);
  CHECK(d.rl.epsilon_schedule == EpsilonSchedule::kLinear);
  CHECK(d.rl.alpha_schedule == AlphaSchedule::kConstant);

  const RunConfig c = parse_run_config(R"({"rl": {"theta": 0.3, "k_max": 12, "reward_mode": "landed",
                                                    "epsilon_schedule": "constant"},
                                            "state": {"variant": "whole"}, "iou_threshold": 0.6,
                                            "downscale": 64})");
  CHECK(c.rl.theta == 0.3);
  CHECK(c.oracle.theta == 0.3);
  CHECK(c.oracle.k_max == 12);
  CHECK(c.rl.reward_mode == RewardMode::kLanded);
  CHECK(c.rl.epsilon_schedule == EpsilonSchedule::kConstant);
  CHECK(c.state.variant == FeatureVariant::kWhole);
  CHECK(c.rl.iou_threshold == 0.6);
  CHECK(c.oracle.iou_threshold == 0.6);
  CHECK(c.downscale == 64);

  const RunConfig e = parse_run_config(R"({"rl": {"theta": 0.3}, "oracle": {"theta": 0.1}})");
  CHECK(e.oracle.theta == 0.1);

  // Round trip through JSON.
  CHECK(run_config_to_json(parse_run_config(run_config_to_json(c))) == run_config_to_json(c));
}

TEST_CASE("config errors name the offending key") {
  CHECK(code_of([] { parse_run_config(R"({"rl": {"thetta": 0.2}})"); }) == ErrorCode::kValidation);
  CHECK(testing::message_of([] { parse_run_config(R"({"rl": {"thetta": 0.2}})"); }).find("rl.thetta") !=
        std::string::npos);
  CHECK(code_of([] { parse_run_config(R"({"bogus": 1})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"seed": "x"})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"rl": 3})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"rl": {"theta": 1.5}})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"split": 1})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"targets": []})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"sweep": {"grid": [0.3, 0.2]}})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config(R"({"state": {"variant": "fancy"}})"); }) == ErrorCode::kValidation);
  CHECK(code_of([] { parse_run_config("{nope"); }) == ErrorCode::kParse);
}

TEST_CASE("config file plus overrides") {
  TempDir dir("cfg");
  testing::spit(dir / "c.json", R"({"seed": 5, "rl": {"theta": 0.25, "epochs": 7}})");
  const RunConfig c = load_run_config(dir / "c.json", R"({"rl": {"theta": 0.4}, "range": "all"})");
  CHECK(c.seed == 5);
  CHECK(c.rl.theta == 0.4);
  CHECK(c.rl.epochs == 7);
  CHECK(c.range == "all");
  CHECK(load_run_config(std::nullopt, "").seed == 1);
  CHECK(code_of([&] { load_run_config(dir / "missing.json"); }) == ErrorCode::kIo);
  CHECK(code_of([&] { load_run_config(std::nullopt, "[1,"); }) == ErrorCode::kParse);
}

TEST_CASE("every mode end to end") {
  TempDir dir("pipe");
  const RunConfig cfg = small_config(dir);
  const PipelineResult syn = run_pipeline("synth", cfg, dir.path());
  CHECK(std::filesystem::exists(dir / "frames" / "000000.pgm"));
  CHECK(std::filesystem::exists(dir / "frames" / "000239.pgm"));
  CHECK(read_detection_log(dir / "detections.jsonl").size() == 240);
  CHECK(syn.summary.find("240 frames") != std::string::npos);

  const PipelineResult tr = run_pipeline("train", cfg, dir / "out");
  REQUIRE(std::filesystem::exists(dir / "out" / "agent.fhop"));
  CHECK(tr.summary.find("[0, 120)") != std::string::npos);

  RunConfig run = cfg;
  run.agent = (dir / "out" / "agent.fhop").string();
  std::vector<std::string> warnings;
  const WarningSink sink = [&](const std::string& m) { warnings.push_back(m); };
  run_pipeline("run", run, dir / "out", sink);
  CHECK(warnings.empty());
  const SkipTrace agent_trace = read_trace(dir / "out" / "trace_agent.csv");
  CHECK(agent_trace.total_frames() == 120);
  const std::string selected = slurp(dir / "out" / "selected_frames.txt");
  CHECK(selected.rfind("120\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(selected.begin(), selected.end(), '\n')) ==
        agent_trace.processed_count());

  RunConfig other = run;
  other.rl.theta = 0.35;
  run_pipeline("run", other, dir / "out2", sink);
  CHECK(warnings.size() == 1);

  run_pipeline("oracle", cfg, dir / "out");
  CHECK(read_trace(dir / "out" / "trace_oracle.csv").total_frames() == 120);

  RunConfig fixed = cfg;
  fixed.baseline.k = 3;
  fixed.range = "all";
  run_pipeline("baseline", fixed, dir / "out");
  CHECK(read_trace(dir / "out" / "trace_fixed.csv").processed_count() == 60);
  fixed.baseline.kind = "diff";
  run_pipeline("baseline", fixed, dir / "out");
  CHECK(read_trace(dir / "out" / "trace_diff.csv").total_frames() == 240);

  const PipelineResult sw = run_pipeline("sweep", cfg, dir / "out");
  CHECK(slurp(dir / "out" / "sweep.csv").rfind("theta,", 0) == 0);
  CHECK(sw.summary.find("best theta") != std::string::npos);

  RunConfig ev = cfg;
  ev.trace = (dir / "out" / "trace_oracle.csv").string();
  const PipelineResult e = run_pipeline("eval", ev, dir / "out");
  CHECK(e.summary.find("feasible yes") != std::string::npos);
  CHECK(slurp(dir / "out" / "eval.csv").find("trace_oracle,") != std::string::npos);

  ev.trace = (dir / "out" / "trace_diff.csv").string();
  CHECK(code_of([&] { run_pipeline("eval", ev, dir / "out"); }) == ErrorCode::kRange);
}

TEST_CASE("report is deterministic and the oracle wins among feasible rows") {
  TempDir dir("report");
  const RunConfig cfg = small_config(dir);
  run_pipeline("synth", cfg, dir.path());
  run_pipeline("report", cfg, dir / "a");
  run_pipeline("report", cfg, dir / "b");
  const std::string a = slurp(dir / "a" / "report.csv");
  CHECK(a == slurp(dir / "b" / "report.csv"));
  CHECK(slurp(dir / "a" / "report.txt") == slurp(dir / "b" / "report.txt"));
  // 3 targets x {oracle, agent, fixed, diff} + header.
  CHECK(std::count(a.begin(), a.end(), '\n') == 13);
}

TEST_CASE("missing inputs and bad modes") {
  TempDir dir("missing");
  RunConfig cfg;
  CHECK(code_of([&] { run_pipeline("train", cfg, dir.path()); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { run_pipeline("run", cfg, dir.path()); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { run_pipeline("eval", cfg, dir.path()); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { run_pipeline("dance", cfg, dir.path()); }) == ErrorCode::kValidation);
  cfg.log = (dir / "none.jsonl").string();
  CHECK(code_of([&] { run_pipeline("oracle", cfg, dir.path()); }) == ErrorCode::kIo);
  cfg.agent = (dir / "none.fhop").string();
  CHECK(code_of([&] { run_pipeline("run", cfg, dir.path()); }) == ErrorCode::kIo);
  CHECK(pipeline_modes().size() == 8);
}
