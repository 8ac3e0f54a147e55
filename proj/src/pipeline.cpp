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
#include "fhop/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fhop/error.hpp"
#include "fhop/eval.hpp"
#include "fhop/synth.hpp"
#include "fhop/threshold_select.hpp"

namespace fhop {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads keys from one config object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) {
      throw Error(ErrorCode::kValidation, "config section '" + name_ + "' must be an object");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  bool is_null(const char* key) const { return j_.contains(key) && j_.at(key).is_null(); }
  void mark(const char* key) { seen_.insert(key); }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kValidation, "config key '" + path(key) + "' has the wrong type (" +
                                              j_.at(key).dump() + ")");
    }
  }

  template <typename E, typename Conv>
  void get_enum(const char* key, E& out, Conv conv) {
    std::string s;
    if (!j_.contains(key)) {
      seen_.insert(key);
      return;
    }
    get(key, s);
    try {
      out = conv(s);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "config key '" + path(key) + "': " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : kEmpty, path(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw Error(ErrorCode::kValidation, "unknown config key '" + path(k) + "'");
    }
  }

 private:
  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Frame> slice_frames(const std::vector<Frame>& frames, Range r) {
  std::vector<Frame> out;
  out.reserve(r.size());
  for (std::size_t i = r.begin; i < r.end; ++i) out.push_back(frames[i].with_index(i - r.begin));
  return out;
}

struct Inputs {
  std::vector<Frame> frames;
  DetectionLog log;
  bool has_frames = false;
  bool has_log = false;
  std::size_t n = 0;
};

Inputs load_inputs(const RunConfig& cfg, const std::string& mode, bool need_frames, bool need_log) {
  Inputs in;
  if (need_frames && cfg.frames.empty()) {
    throw Error(ErrorCode::kValidation, "mode '" + mode + "' needs a frame directory (--frames)");
  }
  if (need_log && cfg.log.empty()) {
    throw Error(ErrorCode::kValidation, "mode '" + mode + "' needs a detection log (--log)");
  }
  if (!cfg.frames.empty()) {
    in.frames = load_frames(cfg.frames, cfg.downscale);
    in.has_frames = true;
    in.n = in.frames.size();
  }
  if (!cfg.log.empty()) {
    in.log = read_detection_log(cfg.log);
    in.has_log = true;
    if (in.has_frames && in.log.size() != in.n) {
      throw Error(ErrorCode::kRange, "frame directory has " + std::to_string(in.n) +
                                         " frames but the detection log has " +
                                         std::to_string(in.log.size()));
    }
    in.n = in.log.size();
  }
  return in;
}

Range resolve_range(const RunConfig& cfg, std::size_t n, const std::string& fallback) {
  const std::string name = cfg.range.empty() ? fallback : cfg.range;
  if (name == "all") return {0, n};
  const Split s = split(n, cfg.split, cfg.rl.k_max);
  return name == "train" ? s.train : s.test;
}

bool detection_variant(const RunConfig& cfg) {
  return cfg.state.variant == FeatureVariant::kDetection;
}

AgentArtifact train_on(const Inputs& in, Range r, const RunConfig& cfg, const RLConfig& rl) {
  const std::vector<Frame> frames = in.has_frames ? slice_frames(in.frames, r) : std::vector<Frame>{};
  return train_agent(frames, in.log.slice(r.begin, r.end), cfg.state, rl, cfg.seed);
}

SkipTrace run_on(const Inputs& in, Range r, const AgentArtifact& agent, double iou) {
  if (agent.state_config.variant == FeatureVariant::kDetection) {
    if (!in.has_log) throw Error(ErrorCode::kValidation, "detection-state agent needs --log");
    return run_agent_on_detections(in.log.slice(r.begin, r.end), agent, iou);
  }
  if (!in.has_frames) throw Error(ErrorCode::kValidation, "pixel-state agent needs --frames");
  return run_agent(slice_frames(in.frames, r), agent);
}

std::string range_text(Range r) {
  return "[" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")";
}

std::string trace_summary(const SkipTrace& t) {
  return "processed " + std::to_string(t.processed_count()) + " of " +
         std::to_string(t.total_frames()) + " frames (" + num(t.fraction_processed(), 4) + ")";
}

}  // namespace

void RunConfig::validate() const {
  if (!(split > 0 && split < 1)) throw Error(ErrorCode::kValidation, "split must be in (0, 1)");
  if (targets.empty()) throw Error(ErrorCode::kValidation, "targets must not be empty");
  for (const double t : targets) {
    if (!(t > 0 && t < 1)) throw Error(ErrorCode::kValidation, "every target must be in (0, 1)");
  }
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw Error(ErrorCode::kValidation, "iou_threshold must be in (0, 1]");
  }
  if (downscale && *downscale < 1) throw Error(ErrorCode::kValidation, "downscale must be >= 1");
  if (!range.empty() && range != "train" && range != "test" && range != "all") {
    throw Error(ErrorCode::kValidation, "range must be train, test or all");
  }
  state.validate();
  rl.validate();
  oracle.validate();
  if (baseline.kind != "fixed" && baseline.kind != "diff") {
    throw Error(ErrorCode::kValidation, "baseline.kind must be fixed or diff");
  }
  if (baseline.k < 0) throw Error(ErrorCode::kValidation, "baseline.k must be >= 0");
  if (!(baseline.tau >= 0)) throw Error(ErrorCode::kValidation, "baseline.tau must be >= 0");
  if (sweep.strategy != "oracle" && sweep.strategy != "agent") {
    throw Error(ErrorCode::kValidation, "sweep.strategy must be oracle or agent");
  }
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (!(sweep.grid[i] > 0 && sweep.grid[i] < 1)) {
      throw Error(ErrorCode::kValidation, "sweep.grid values must be in (0, 1)");
    }
    if (i && !(sweep.grid[i] > sweep.grid[i - 1])) {
      throw Error(ErrorCode::kValidation, "sweep.grid must be strictly ascending");
    }
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text.empty() ? std::string("{}") : json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  root.get("frames", c.frames);
  root.get("log", c.log);
  root.get("agent", c.agent);
  root.get("trace", c.trace);
  if (root.has("downscale") && !root.is_null("downscale")) {
    int d = 0;
    root.get("downscale", d);
    c.downscale = d;
  }
  root.mark("downscale");
  root.get("seed", c.seed);
  root.get("split", c.split);
  root.get("targets", c.targets);
  root.get("iou_threshold", c.iou_threshold);
  root.get("range", c.range);

  Section st = root.child("state");
  st.get_enum("variant", c.state.variant, feature_variant_from_string);
  st.get("grid_rows", c.state.grid_rows);
  st.get("grid_cols", c.state.grid_cols);
  st.get("pixel_change_threshold", c.state.pixel_change_threshold);
  st.get("k", c.state.k);
  st.get("minibatch_size", c.state.minibatch_size);
  st.get("segment_seconds", c.state.segment_seconds);
  st.get("fps", c.state.fps);
  st.get("beta1", c.state.beta1);
  st.get("beta2", c.state.beta2);
  st.get_enum("pairing", c.state.pairing, feature_pairing_from_string);
  st.finish();

  Section rl = root.child("rl");
  rl.get("alpha", c.rl.alpha);
  rl.get_enum("alpha_schedule", c.rl.alpha_schedule, alpha_schedule_from_string);
  rl.get("gamma", c.rl.gamma);
  rl.get("psi1", c.rl.psi1);
  rl.get("psi2", c.rl.psi2);
  rl.get("theta", c.rl.theta);
  rl.get("k_max", c.rl.k_max);
  rl.get("epochs", c.rl.epochs);
  rl.get("epsilon", c.rl.epsilon);
  rl.get_enum("epsilon_schedule", c.rl.epsilon_schedule, epsilon_schedule_from_string);
  rl.get_enum("exploration", c.rl.exploration, exploration_from_string);
  rl.get_enum("reward_mode", c.rl.reward_mode, reward_mode_from_string);
  rl.finish();
  c.rl.iou_threshold = c.iou_threshold;

  c.oracle = OracleConfig{c.rl.theta, c.rl.k_max, c.iou_threshold};
  Section orc = root.child("oracle");
  orc.get("theta", c.oracle.theta);
  orc.get("k_max", c.oracle.k_max);
  orc.finish();

  Section bl = root.child("baseline");
  bl.get("kind", c.baseline.kind);
  bl.get("k", c.baseline.k);
  bl.get("tau", c.baseline.tau);
  bl.finish();

  Section sw = root.child("sweep");
  sw.get("strategy", c.sweep.strategy);
  sw.get("grid", c.sweep.grid);
  sw.finish();

  Section sy = root.child("synth");
  sy.get("preset", c.synth.preset);
  sy.get("n_frames", c.synth.n_frames);
  sy.finish();

  root.finish();
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["frames"] = c.frames;
  j["log"] = c.log;
  j["agent"] = c.agent;
  j["trace"] = c.trace;
  j["downscale"] = c.downscale ? nlohmann::ordered_json(*c.downscale) : nullptr;
  j["seed"] = c.seed;
  j["split"] = c.split;
  j["targets"] = c.targets;
  j["iou_threshold"] = c.iou_threshold;
  j["range"] = c.range;
  j["state"] = {{"variant", to_string(c.state.variant)},
                {"grid_rows", c.state.grid_rows},
                {"grid_cols", c.state.grid_cols},
                {"pixel_change_threshold", c.state.pixel_change_threshold},
                {"k", c.state.k},
                {"minibatch_size", c.state.minibatch_size},
                {"segment_seconds", c.state.segment_seconds},
                {"fps", c.state.fps},
                {"beta1", c.state.beta1},
                {"beta2", c.state.beta2},
                {"pairing", to_string(c.state.pairing)}};
  j["rl"] = {{"alpha", c.rl.alpha},
             {"alpha_schedule", to_string(c.rl.alpha_schedule)},
             {"gamma", c.rl.gamma},
             {"psi1", c.rl.psi1},
             {"psi2", c.rl.psi2},
             {"theta", c.rl.theta},
             {"k_max", c.rl.k_max},
             {"epochs", c.rl.epochs},
             {"epsilon", c.rl.epsilon},
             {"epsilon_schedule", to_string(c.rl.epsilon_schedule)},
             {"exploration", to_string(c.rl.exploration)},
             {"reward_mode", to_string(c.rl.reward_mode)}};
  j["oracle"] = {{"theta", c.oracle.theta}, {"k_max", c.oracle.k_max}};
  j["baseline"] = {{"kind", c.baseline.kind}, {"k", c.baseline.k}, {"tau", c.baseline.tau}};
  j["sweep"] = {{"strategy", c.sweep.strategy}, {"grid", c.sweep.grid}};
  j["synth"] = {{"preset", c.synth.preset}, {"n_frames", c.synth.n_frames}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::optional<fs::path>& path, const std::string& overrides_json) {
  json base = json::object();
  if (path) {
    try {
      base = json::parse(read_text(*path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, "config " + path->string() + " is not valid JSON: " + e.what());
    }
  }
  if (!overrides_json.empty()) {
    try {
      base.merge_patch(json::parse(overrides_json));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("overrides are not valid JSON: ") + e.what());
    }
  }
  return parse_run_config(base.dump());
}

std::vector<std::string> pipeline_modes() {
  return {"train", "run", "oracle", "baseline", "sweep", "eval", "synth", "report"};
}

PipelineResult run_pipeline(const std::string& mode, const RunConfig& cfg, const fs::path& out_dir,
                            const WarningSink& warn) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory " + out_dir.string());
  PipelineResult res;
  auto emit = [&](const fs::path& name, const std::string& text) {
    const fs::path p = out_dir / name;
    write_text(p, text);
    res.written.push_back(p);
  };
  auto line = [&](const std::string& s) { res.summary += s + "\n"; };
  const double iou = cfg.iou_threshold;

  if (mode == "synth") {
    const SceneSpec spec = preset(cfg.synth.preset, cfg.synth.n_frames, cfg.seed);
    const Scene scene = generate_scene(spec);
    const fs::path frame_dir = out_dir / "frames";
    fs::create_directories(frame_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + frame_dir.string());
    for (const Frame& f : scene.frames) {
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.pgm", f.index());
      write_frame_pgm(f, frame_dir / name);
    }
    res.written.push_back(frame_dir);
    emit("detections.jsonl", format_detection_log(scene.log));
    line("preset " + cfg.synth.preset + ": " + std::to_string(scene.frames.size()) + " frames " +
         std::to_string(spec.width) + "x" + std::to_string(spec.height));
    line("frames: " + frame_dir.string());
    line("log: " + (out_dir / "detections.jsonl").string());
    return res;
  }

  if (mode == "train") {
    const Inputs in = load_inputs(cfg, mode, !detection_variant(cfg), true);
    const Range r = resolve_range(cfg, in.n, "train");
    const AgentArtifact agent = train_on(in, r, cfg, cfg.rl);
    const fs::path p = out_dir / "agent.fhop";
    save_agent(agent, p);
    res.written.push_back(p);
    line("trained on frames " + range_text(r) + ": " + std::to_string(agent.state_model.k()) +
         " states, " + std::to_string(agent.q_table.actions()) + " actions");
    line("agent: " + p.string());
    return res;
  }

  if (mode == "run") {
    if (cfg.agent.empty()) throw Error(ErrorCode::kValidation, "mode 'run' needs an agent (--agent)");
    const AgentArtifact agent =
        load_agent(cfg.agent, config_fingerprint(cfg.state, cfg.rl, cfg.seed), warn);
    const bool det = agent.state_config.variant == FeatureVariant::kDetection;
    const Inputs in = load_inputs(cfg, mode, !det, det);
    const Range r = resolve_range(cfg, in.n, "test");
    const SkipTrace trace = run_on(in, r, agent, iou);
    emit("trace_agent.csv", format_trace(trace));
    std::string selected;
    for (const std::size_t i : trace.processed_indices()) selected += std::to_string(r.begin + i) + "\n";
    emit("selected_frames.txt", selected);
    line("frames " + range_text(r) + ": " + trace_summary(trace));
    return res;
  }

  if (mode == "oracle") {
    const Inputs in = load_inputs(cfg, mode, false, true);
    const Range r = resolve_range(cfg, in.n, "test");
    const SkipTrace trace = oracle_select(in.log.slice(r.begin, r.end), cfg.oracle);
    emit("trace_oracle.csv", format_trace(trace));
    line("oracle theta=" + num(cfg.oracle.theta, 4) + " frames " + range_text(r) + ": " +
         trace_summary(trace));
    return res;
  }

  if (mode == "baseline") {
    const bool diff = cfg.baseline.kind == "diff";
    const Inputs in = load_inputs(cfg, mode, diff, false);
    if (!in.has_frames && !in.has_log) {
      throw Error(ErrorCode::kValidation, "mode 'baseline' needs --frames or --log");
    }
    const Range r = resolve_range(cfg, in.n, "test");
    const SkipTrace trace =
        diff ? diff_threshold_baseline(slice_frames(in.frames, r), cfg.baseline.tau, cfg.rl.k_max,
                                       cfg.state)
             : fixed_skip(r.size(), static_cast<std::size_t>(cfg.baseline.k));
    emit("trace_" + cfg.baseline.kind + ".csv", format_trace(trace));
    line(cfg.baseline.kind + " baseline frames " + range_text(r) + ": " + trace_summary(trace));
    return res;
  }

  if (mode == "sweep") {
    const bool agent = cfg.sweep.strategy == "agent";
    const Inputs in = load_inputs(cfg, mode, agent && !detection_variant(cfg), true);
    const Range r = resolve_range(cfg, in.n, "train");
    const DetectionLog log = in.log.slice(r.begin, r.end);
    const std::vector<double> grid = cfg.sweep.grid.empty() ? default_theta_grid() : cfg.sweep.grid;
    const SweepResult sw =
        agent ? sweep_theta_agent(in.has_frames ? slice_frames(in.frames, r) : std::vector<Frame>{},
                                  log, cfg.state, cfg.rl, grid, cfg.seed)
              : sweep_theta_oracle(log, grid, cfg.oracle.k_max, iou);
    emit("sweep.csv", format_sweep_csv(sw));
    emit("sweep.txt", format_sweep_table(sw));
    line(cfg.sweep.strategy + " sweep over frames " + range_text(r) + ": best theta " +
         num(sw.best_theta, 4));
    return res;
  }

  if (mode == "eval") {
    if (cfg.trace.empty()) throw Error(ErrorCode::kValidation, "mode 'eval' needs a trace (--trace)");
    const Inputs in = load_inputs(cfg, mode, false, true);
    const Range r = resolve_range(cfg, in.n, "test");
    const SkipTrace trace = read_trace(cfg.trace);
    EvalReport rep = evaluate(trace, in.log.slice(r.begin, r.end), iou, cfg.rl.theta);
    rep.strategy = fs::path(cfg.trace).stem().string();
    rep.target_f1 = 1.0 - cfg.rl.theta;
    emit("eval.csv", format_reports_csv({rep}));
    emit("eval.txt", format_reports_table({rep}));
    line(rep.strategy + ": fraction_processed " + num(rep.fraction_processed, 4) + ", achieved_f1 " +
         num(rep.achieved_f1, 4) + ", feasible " + (*rep.feasible ? "yes" : "no"));
    return res;
  }

  if (mode == "report") {
    const bool det = detection_variant(cfg);
    const Inputs in = load_inputs(cfg, mode, !det, true);
    const Split s = split(in.n, cfg.split, cfg.rl.k_max);
    const DetectionLog test_log = in.log.slice(s.test.begin, s.test.end);
    std::vector<EvalReport> reports;
    auto add = [&](const std::string& name, double target, const SkipTrace& trace) {
      EvalReport rep = evaluate(trace, test_log, iou, 1.0 - target);
      rep.strategy = name;
      rep.target_f1 = target;
      reports.push_back(rep);
    };
    for (const double target : cfg.targets) {
      const double theta = 1.0 - target;
      add("oracle", target, oracle_select(test_log, OracleConfig{theta, cfg.oracle.k_max, iou}));
      RLConfig rl = cfg.rl;
      rl.theta = theta;
      add("agent", target, run_on(in, s.test, train_on(in, s.train, cfg, rl), iou));
      add("fixed", target, fixed_skip(s.test.size(), static_cast<std::size_t>(cfg.baseline.k)));
      if (in.has_frames) {
        add("diff", target,
            diff_threshold_baseline(slice_frames(in.frames, s.test), cfg.baseline.tau,
                                    cfg.rl.k_max, cfg.state));
      }
    }
    emit("report.csv", format_reports_csv(reports));
    emit("report.txt", format_reports_table(reports));
    line("report over test frames " + range_text(s.test) + ", " + std::to_string(reports.size()) +
         " rows");
    return res;
  }

  std::string modes;
  for (const std::string& m : pipeline_modes()) modes += (modes.empty() ? "" : ", ") + m;
  throw Error(ErrorCode::kValidation, "unknown mode '" + mode + "' (expected one of " + modes + ")");
}

}  // namespace fhop
