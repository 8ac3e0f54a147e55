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
#include "fhop/fhop.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <string>
#include <utility>

#include "fhop/agent.hpp"
#include "fhop/error.hpp"
#include "fhop/eval.hpp"
#include "fhop/frame_io.hpp"
#include "fhop/oracle.hpp"
#include "fhop/pipeline.hpp"
#include "fhop/synth.hpp"
#include "fhop/threshold_select.hpp"

struct fhop_frames {
  std::vector<fhop::Frame> frames;
};
struct fhop_log {
  fhop::DetectionLog log;
};
struct fhop_trace {
  fhop::SkipTrace trace;
};
struct fhop_agent {
  fhop::AgentArtifact agent;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_warn_mu;
fhop_warning_fn g_warn_fn = nullptr;
void* g_warn_user = nullptr;

void warn(const std::string& message) {
  fhop_warning_fn fn;
  void* user;
  {
    std::lock_guard<std::mutex> lock(g_warn_mu);
    fn = g_warn_fn;
    user = g_warn_user;
  }
  if (fn) {
    fn(message.c_str(), user);
  } else {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

template <typename F>
fhop_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return FHOP_OK;
  } catch (const fhop::Error& e) {
    g_last_error = e.what();
    return static_cast<fhop_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return FHOP_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) throw fhop::Error(fhop::ErrorCode::kValidation, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fhop::StateConfig to_cpp(const fhop_state_config& c) {
  fhop::StateConfig s;
  if (c.variant < 0 || c.variant > 2) throw fhop::Error(fhop::ErrorCode::kValidation, "unknown variant");
  if (c.pairing < 0 || c.pairing > 1) throw fhop::Error(fhop::ErrorCode::kValidation, "unknown pairing");
  s.variant = static_cast<fhop::FeatureVariant>(c.variant);
  s.grid_rows = c.grid_rows;
  s.grid_cols = c.grid_cols;
  s.pixel_change_threshold = c.pixel_change_threshold;
  s.k = c.k;
  s.minibatch_size = c.minibatch_size;
  s.segment_seconds = c.segment_seconds;
  s.fps = c.fps;
  s.beta1 = c.beta1;
  s.beta2 = c.beta2;
  s.pairing = static_cast<fhop::FeaturePairing>(c.pairing);
  return s;
}

fhop::RLConfig to_cpp(const fhop_rl_config& c) {
  fhop::RLConfig r;
  if (c.alpha_schedule < 0 || c.alpha_schedule > 1 || c.exploration < 0 || c.exploration > 1 ||
      c.epsilon_schedule < 0 || c.epsilon_schedule > 1 ||
      c.reward_mode < 0 || c.reward_mode > 2) {
    throw fhop::Error(fhop::ErrorCode::kValidation, "unknown rl enum value");
  }
  r.alpha = c.alpha;
  r.alpha_schedule = c.alpha_schedule == FHOP_ALPHA_HARMONIC ? fhop::AlphaSchedule::kHarmonic
                                                             : fhop::AlphaSchedule::kConstant;
  r.gamma = c.gamma;
  r.psi1 = c.psi1;
  r.psi2 = c.psi2;
  r.theta = c.theta;
  r.k_max = c.k_max;
  r.epochs = c.epochs;
  r.epsilon = c.epsilon;
  r.epsilon_schedule = c.epsilon_schedule == FHOP_EPSILON_CONSTANT
                           ? fhop::EpsilonSchedule::kConstant
                           : fhop::EpsilonSchedule::kLinear;
  r.exploration =
      c.exploration == FHOP_EXPLORE_WALK ? fhop::Exploration::kWalk : fhop::Exploration::kSweep;
  r.reward_mode = static_cast<fhop::RewardMode>(c.reward_mode);
  r.iou_threshold = c.iou_threshold;
  return r;
}

}  // namespace

extern "C" {

const char* fhop_last_error(void) { return g_last_error.c_str(); }

const char* fhop_status_name(fhop_status status) {
  if (status == FHOP_OK) return "ok";
  if (status == FHOP_ERR_INTERNAL) return "internal";
  return fhop::error_code_name(static_cast<fhop::ErrorCode>(status));
}

int fhop_exit_code(fhop_status status) {
  if (status == FHOP_OK) return 0;
  if (status == FHOP_ERR_INTERNAL) return 1;
  return fhop::exit_code_for(static_cast<fhop::ErrorCode>(status));
}

const char* fhop_version(void) { return "1.0.0"; }

void fhop_string_free(char* s) { std::free(s); }

void fhop_set_warning_handler(fhop_warning_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_warn_mu);
  g_warn_fn = fn;
  g_warn_user = user;
}

void fhop_state_config_default(fhop_state_config* cfg) {
  if (!cfg) return;
  const fhop::StateConfig s;
  cfg->variant = static_cast<int>(s.variant);
  cfg->grid_rows = s.grid_rows;
  cfg->grid_cols = s.grid_cols;
  cfg->pixel_change_threshold = s.pixel_change_threshold;
  cfg->k = s.k;
  cfg->minibatch_size = s.minibatch_size;
  cfg->segment_seconds = s.segment_seconds;
  cfg->fps = s.fps;
  cfg->beta1 = s.beta1;
  cfg->beta2 = s.beta2;
  cfg->pairing = static_cast<int>(s.pairing);
}

void fhop_rl_config_default(fhop_rl_config* cfg) {
  if (!cfg) return;
  const fhop::RLConfig r;
  cfg->alpha = r.alpha;
  cfg->alpha_schedule = r.alpha_schedule == fhop::AlphaSchedule::kHarmonic ? FHOP_ALPHA_HARMONIC
                                                                           : FHOP_ALPHA_CONSTANT;
  cfg->gamma = r.gamma;
  cfg->psi1 = r.psi1;
  cfg->psi2 = r.psi2;
  cfg->theta = r.theta;
  cfg->k_max = r.k_max;
  cfg->epochs = r.epochs;
  cfg->epsilon = r.epsilon;
  cfg->epsilon_schedule = r.epsilon_schedule == fhop::EpsilonSchedule::kConstant
                              ? FHOP_EPSILON_CONSTANT
                              : FHOP_EPSILON_LINEAR;
  cfg->exploration = r.exploration == fhop::Exploration::kWalk ? FHOP_EXPLORE_WALK : FHOP_EXPLORE_SWEEP;
  cfg->reward_mode = static_cast<int>(r.reward_mode);
  cfg->iou_threshold = r.iou_threshold;
}

fhop_status fhop_frames_load(const char* dir, int downscale, fhop_frames** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    std::optional<int> ds;
    if (downscale < 0) throw fhop::Error(fhop::ErrorCode::kValidation, "downscale must be >= 0");
    if (downscale > 0) ds = downscale;
    *out = new fhop_frames{fhop::load_frames(dir, ds)};
  });
}

size_t fhop_frames_count(const fhop_frames* frames) { return frames ? frames->frames.size() : 0; }

fhop_status fhop_frames_size(const fhop_frames* frames, int* width, int* height) {
  return guard([&] {
    require(frames, "frames");
    if (frames->frames.empty()) throw fhop::Error(fhop::ErrorCode::kEmpty, "no frames");
    if (width) *width = frames->frames[0].width();
    if (height) *height = frames->frames[0].height();
  });
}

fhop_status fhop_frames_slice(const fhop_frames* frames, size_t begin, size_t end,
                              fhop_frames** out) {
  return guard([&] {
    require(frames, "frames");
    require(out, "out");
    if (begin > end || end > frames->frames.size()) {
      throw fhop::Error(fhop::ErrorCode::kRange, "slice out of range");
    }
    std::vector<fhop::Frame> part;
    for (size_t i = begin; i < end; ++i) part.push_back(frames->frames[i].with_index(i - begin));
    *out = new fhop_frames{std::move(part)};
  });
}

void fhop_frames_free(fhop_frames* frames) { delete frames; }

fhop_status fhop_log_read(const char* path, fhop_log** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new fhop_log{fhop::read_detection_log(path)};
  });
}

fhop_status fhop_log_parse(const char* text, fhop_log** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new fhop_log{fhop::parse_detection_log(text)};
  });
}

fhop_status fhop_log_write(const fhop_log* log, const char* path) {
  return guard([&] {
    require(log, "log");
    require(path, "path");
    fhop::write_detection_log(log->log, path);
  });
}

fhop_status fhop_log_format(const fhop_log* log, char** out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    *out = dup_string(fhop::format_detection_log(log->log));
  });
}

size_t fhop_log_count(const fhop_log* log) { return log ? log->log.size() : 0; }

fhop_status fhop_log_detections(const fhop_log* log, size_t frame, size_t* count) {
  return guard([&] {
    require(log, "log");
    require(count, "count");
    *count = log->log.at(frame).size();
  });
}

fhop_status fhop_log_slice(const fhop_log* log, size_t begin, size_t end, fhop_log** out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    *out = new fhop_log{log->log.slice(begin, end)};
  });
}

void fhop_log_free(fhop_log* log) { delete log; }

fhop_status fhop_frame_distance(const fhop_log* log, size_t i, size_t j, double iou, double* out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    *out = fhop::frame_distance(log->log, i, j, iou);
  });
}

fhop_status fhop_skip_error(const fhop_log* log, size_t i, size_t k, double iou, double* out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    *out = fhop::skip_error(log->log, i, k, iou);
  });
}

fhop_status fhop_synth_preset(const char* name, size_t n_frames, uint64_t seed,
                              fhop_frames** frames, fhop_log** log) {
  return guard([&] {
    require(name, "name");
    fhop::Scene scene = fhop::generate_scene(fhop::preset(name, n_frames, seed));
    if (frames) *frames = new fhop_frames{std::move(scene.frames)};
    if (log) *log = new fhop_log{std::move(scene.log)};
  });
}

fhop_status fhop_agent_train(const fhop_frames* frames, const fhop_log* log,
                             const fhop_state_config* state, const fhop_rl_config* rl,
                             uint64_t seed, fhop_agent** out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    fhop_state_config sc;
    fhop_rl_config rc;
    fhop_state_config_default(&sc);
    fhop_rl_config_default(&rc);
    const fhop::StateConfig s = to_cpp(state ? *state : sc);
    const fhop::RLConfig r = to_cpp(rl ? *rl : rc);
    static const std::vector<fhop::Frame> kNone;
    const std::vector<fhop::Frame>& f = frames ? frames->frames : kNone;
    *out = new fhop_agent{fhop::train_agent(f, log->log, s, r, seed)};
  });
}

fhop_status fhop_agent_save(const fhop_agent* agent, const char* path) {
  return guard([&] {
    require(agent, "agent");
    require(path, "path");
    fhop::save_agent(agent->agent, path);
  });
}

fhop_status fhop_agent_load(const char* path, fhop_agent** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new fhop_agent{fhop::load_agent(path, std::nullopt, warn)};
  });
}

fhop_status fhop_agent_shape(const fhop_agent* agent, size_t* states, size_t* actions) {
  return guard([&] {
    require(agent, "agent");
    if (states) *states = agent->agent.q_table.states();
    if (actions) *actions = agent->agent.q_table.actions();
  });
}

fhop_status fhop_agent_run(const fhop_agent* agent, const fhop_frames* frames, const fhop_log* log,
                           double iou, fhop_trace** out) {
  return guard([&] {
    require(agent, "agent");
    require(out, "out");
    if (agent->agent.state_config.variant == fhop::FeatureVariant::kDetection) {
      require(log, "log");
      *out = new fhop_trace{fhop::run_agent_on_detections(log->log, agent->agent, iou)};
    } else {
      require(frames, "frames");
      *out = new fhop_trace{fhop::run_agent(frames->frames, agent->agent)};
    }
  });
}

void fhop_agent_free(fhop_agent* agent) { delete agent; }

fhop_status fhop_oracle_select(const fhop_log* log, double theta, int k_max, double iou,
                               fhop_trace** out) {
  return guard([&] {
    require(log, "log");
    require(out, "out");
    *out = new fhop_trace{fhop::oracle_select(log->log, fhop::OracleConfig{theta, k_max, iou})};
  });
}

fhop_status fhop_fixed_skip(size_t n_frames, size_t k, fhop_trace** out) {
  return guard([&] {
    require(out, "out");
    *out = new fhop_trace{fhop::fixed_skip(n_frames, k)};
  });
}

fhop_status fhop_diff_baseline(const fhop_frames* frames, double tau, int k_max,
                               const fhop_state_config* state, fhop_trace** out) {
  return guard([&] {
    require(frames, "frames");
    require(out, "out");
    fhop_state_config sc;
    fhop_state_config_default(&sc);
    *out = new fhop_trace{
        fhop::diff_threshold_baseline(frames->frames, tau, k_max, to_cpp(state ? *state : sc))};
  });
}

fhop_status fhop_trace_read(const char* path, fhop_trace** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new fhop_trace{fhop::read_trace(path)};
  });
}

fhop_status fhop_trace_write(const fhop_trace* trace, const char* path) {
  return guard([&] {
    require(trace, "trace");
    require(path, "path");
    fhop::write_trace(trace->trace, path);
  });
}

size_t fhop_trace_total_frames(const fhop_trace* trace) {
  return trace ? trace->trace.total_frames() : 0;
}

size_t fhop_trace_processed_count(const fhop_trace* trace) {
  return trace ? trace->trace.processed_count() : 0;
}

fhop_status fhop_trace_entry(const fhop_trace* trace, size_t i, size_t* processed_index,
                             size_t* skip_length) {
  return guard([&] {
    require(trace, "trace");
    if (i >= trace->trace.entries().size()) {
      throw fhop::Error(fhop::ErrorCode::kRange, "trace entry " + std::to_string(i) + " out of range");
    }
    const fhop::TraceEntry& e = trace->trace.entries()[i];
    if (processed_index) *processed_index = e.processed_index;
    if (skip_length) *skip_length = e.skip_length;
  });
}

void fhop_trace_free(fhop_trace* trace) { delete trace; }

fhop_status fhop_evaluate(const fhop_trace* trace, const fhop_log* log, double iou, double theta,
                          fhop_eval_report* out) {
  return guard([&] {
    require(trace, "trace");
    require(log, "log");
    require(out, "out");
    std::optional<double> th;
    if (theta > 0) th = theta;
    const fhop::EvalReport r = fhop::evaluate(trace->trace, log->log, iou, th);
    out->fraction_processed = r.fraction_processed;
    out->fraction_filtered = r.fraction_filtered;
    out->error_per_skipped_frame = r.error_per_skipped_frame;
    out->achieved_f1 = r.achieved_f1;
    out->achieved_f1_skipped = r.achieved_f1_skipped;
    out->count_accuracy = r.count_accuracy;
    out->frames_total = r.frames_total;
    out->frames_processed = r.frames_processed;
    out->feasible = r.feasible ? (*r.feasible ? 1 : 0) : -1;
  });
}

fhop_status fhop_sweep_oracle(const fhop_log* log, int k_max, double iou, double* best_theta) {
  return guard([&] {
    require(log, "log");
    require(best_theta, "best_theta");
    const std::vector<double> grid = fhop::default_theta_grid();
    *best_theta = fhop::sweep_theta_oracle(log->log, grid, k_max, iou).best_theta;
  });
}

fhop_status fhop_run_pipeline(const char* mode, const char* config_path, const char* overrides_json,
                              const char* out_dir, char** summary) {
  return guard([&] {
    require(mode, "mode");
    require(out_dir, "out_dir");
    std::optional<std::filesystem::path> path;
    if (config_path) path = config_path;
    const fhop::RunConfig cfg =
        fhop::load_run_config(path, overrides_json ? overrides_json : "");
    const fhop::PipelineResult res = fhop::run_pipeline(mode, cfg, out_dir, warn);
    if (summary) *summary = dup_string(res.summary);
  });
}

}  // extern "C"
