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
#include "fhop/agent.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fhop/error.hpp"

namespace fhop {

namespace {

constexpr char kMagic[8] = {'F', 'H', 'O', 'P', 'A', 'G', 'N', 'T'};
// Magic through the shape fields, plus the trailing checksum.
constexpr std::size_t kFixedBytes = 8 + 4 + 8 + 4 + 4 + 5 * 4 + 4 * 8 + 2 * 4 + 8 + 3 * 4 + 8;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kCorrupt, "agent artifact is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

void append_field(std::string& out, const char* name, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g;", name, v);
  out += buf;
}

}  // namespace

void AgentArtifact::validate() const {
  if (q_table.states() != state_model.k()) {
    throw Error(ErrorCode::kValidation, "Q-table has " + std::to_string(q_table.states()) +
                                            " rows but the state model has " +
                                            std::to_string(state_model.k()) + " clusters");
  }
  if (q_table.actions() < 2) throw Error(ErrorCode::kValidation, "Q-table needs at least two actions");
  if (state_model.variant() != state_config.variant ||
      state_model.dimension() != state_config.feature_dimension()) {
    throw Error(ErrorCode::kValidation, "state model does not match the feature configuration");
  }
}

std::uint64_t config_fingerprint(const StateConfig& s, const RLConfig& r, std::uint64_t seed) {
  std::string canon = "fhop-train-v1;";
  canon += std::string("variant=") + to_string(s.variant) + ";";
  canon += std::string("pairing=") + to_string(s.pairing) + ";";
  append_field(canon, "grid_rows", s.grid_rows);
  append_field(canon, "grid_cols", s.grid_cols);
  append_field(canon, "pixel_change_threshold", s.pixel_change_threshold);
  append_field(canon, "k", s.k);
  append_field(canon, "minibatch_size", s.minibatch_size);
  append_field(canon, "segment_seconds", s.segment_seconds);
  append_field(canon, "fps", s.fps);
  append_field(canon, "beta1", s.beta1);
  append_field(canon, "beta2", s.beta2);
  append_field(canon, "alpha", r.alpha);
  canon += std::string("alpha_schedule=") + to_string(r.alpha_schedule) + ";";
  append_field(canon, "gamma", r.gamma);
  append_field(canon, "psi1", r.psi1);
  append_field(canon, "psi2", r.psi2);
  append_field(canon, "theta", r.theta);
  append_field(canon, "k_max", r.k_max);
  append_field(canon, "epochs", r.epochs);
  append_field(canon, "epsilon", r.epsilon);
  canon += std::string("epsilon_schedule=") + to_string(r.epsilon_schedule) + ";";
  canon += std::string("exploration=") + to_string(r.exploration) + ";";
  canon += std::string("reward_mode=") + to_string(r.reward_mode) + ";";
  append_field(canon, "iou_threshold", r.iou_threshold);
  canon += "seed=" + std::to_string(seed) + ";";
  return fnv1a(canon);
}

AgentArtifact train_agent(std::span<const Frame> frames, const DetectionLog& log,
                          const StateConfig& state_cfg, const RLConfig& rl_cfg,
                          std::uint64_t seed) {
  state_cfg.validate();
  rl_cfg.validate();
  const auto source = make_feature_source(frames, &log, state_cfg, rl_cfg.iou_threshold);
  if (source->size() != log.size()) {
    throw Error(ErrorCode::kRange, "frames (" + std::to_string(source->size()) +
                                       ") and detection log (" + std::to_string(log.size()) +
                                       ") are not aligned");
  }
  // Separate streams for clustering and for the SARSA walk.
  const std::vector<StateFeature> stream =
      clustering_stream(*source, state_cfg, rl_cfg.k_max, seed ^ 0x9e3779b97f4a7c15ULL);
  AgentArtifact agent;
  agent.config_fingerprint = config_fingerprint(state_cfg, rl_cfg, seed);
  agent.state_config = state_cfg;
  agent.state_model = fit_clusters(stream, state_cfg, seed);
  agent.q_table = train(*source, log, agent.state_model, state_cfg, rl_cfg, seed + 1);
  if (state_cfg.variant != FeatureVariant::kDetection && !frames.empty()) {
    agent.frame_width = frames.front().width();
    agent.frame_height = frames.front().height();
  }
  agent.validate();
  return agent;
}

SkipTrace run_agent(std::span<const Frame> frames, const AgentArtifact& agent) {
  agent.validate();
  if (agent.state_config.variant == FeatureVariant::kDetection) {
    throw Error(ErrorCode::kValidation,
                "agent uses detection-based states; run it with run_agent_on_detections");
  }
  if (!frames.empty() && agent.frame_width > 0 &&
      (frames.front().width() != agent.frame_width || frames.front().height() != agent.frame_height)) {
    throw Error(ErrorCode::kDimension,
                "frames are " + std::to_string(frames.front().width()) + "x" +
                    std::to_string(frames.front().height()) + " but the agent was trained on " +
                    std::to_string(agent.frame_width) + "x" + std::to_string(agent.frame_height));
  }
  PixelFeatureSource source(frames, agent.state_config);
  return run_policy(source, agent.state_model, agent.q_table);
}

SkipTrace run_agent_on_detections(const DetectionLog& log, const AgentArtifact& agent,
                                  double iou_threshold) {
  agent.validate();
  if (agent.state_config.variant != FeatureVariant::kDetection) {
    throw Error(ErrorCode::kValidation, "agent uses pixel states; run it on frames");
  }
  DetectionFeatureSource source(log, agent.state_config, iou_threshold);
  return run_policy(source, agent.state_model, agent.q_table);
}

std::string serialize_agent(const AgentArtifact& agent) {
  agent.validate();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(agent.format_version);
  w.u64(agent.config_fingerprint);
  const StateConfig& s = agent.state_config;
  w.u32(static_cast<std::uint32_t>(s.variant));
  w.u32(static_cast<std::uint32_t>(s.pairing));
  w.i32(s.grid_rows);
  w.i32(s.grid_cols);
  w.i32(s.pixel_change_threshold);
  w.i32(s.k);
  w.i32(s.minibatch_size);
  w.f64(s.segment_seconds);
  w.f64(s.fps);
  w.f64(s.beta1);
  w.f64(s.beta2);
  w.i32(agent.frame_width);
  w.i32(agent.frame_height);
  w.u64(agent.state_model.fitted_samples());
  w.u32(static_cast<std::uint32_t>(agent.state_model.k()));
  w.u32(static_cast<std::uint32_t>(agent.state_model.dimension()));
  w.u32(static_cast<std::uint32_t>(agent.q_table.actions()));
  for (double v : agent.state_model.centroid_data()) w.f64(v);
  for (double v : agent.q_table.values()) w.f64(v);
  w.u64(fnv1a(w.str()));
  return std::move(w.str());
}

AgentArtifact deserialize_agent(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::kCorrupt, "not an agent artifact (bad magic)");
  }
  if (bytes.size() < kFixedBytes) throw Error(ErrorCode::kCorrupt, "agent artifact is truncated");
  Reader r(bytes);
  r.skip(sizeof kMagic);
  AgentArtifact a;
  a.format_version = r.u32();
  if (a.format_version != kAgentFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "agent artifact format version " + std::to_string(a.format_version) +
                    " is not supported (expected " + std::to_string(kAgentFormatVersion) + ")");
  }
  a.config_fingerprint = r.u64();
  StateConfig& s = a.state_config;
  const std::uint32_t variant = r.u32();
  const std::uint32_t pairing = r.u32();
  if (variant > 2 || pairing > 1) throw Error(ErrorCode::kCorrupt, "unknown feature variant or pairing");
  s.variant = static_cast<FeatureVariant>(variant);
  s.pairing = static_cast<FeaturePairing>(pairing);
  s.grid_rows = r.i32();
  s.grid_cols = r.i32();
  s.pixel_change_threshold = r.i32();
  s.k = r.i32();
  s.minibatch_size = r.i32();
  s.segment_seconds = r.f64();
  s.fps = r.f64();
  s.beta1 = r.f64();
  s.beta2 = r.f64();
  a.frame_width = r.i32();
  a.frame_height = r.i32();
  const std::uint64_t fitted = r.u64();
  const std::uint32_t k = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint32_t actions = r.u32();
  const std::uint64_t payload = (static_cast<std::uint64_t>(k) * dim + static_cast<std::uint64_t>(k) * actions) * 8;
  if (k == 0 || dim == 0 || actions == 0 || payload + 8 != bytes.size() - r.pos()) {
    throw Error(ErrorCode::kCorrupt, "agent artifact size does not match its header (truncated?)");
  }
  std::vector<double> centroids(static_cast<std::size_t>(k) * dim);
  for (double& v : centroids) v = r.f64();
  std::vector<double> q(static_cast<std::size_t>(k) * actions);
  for (double& v : q) v = r.f64();
  const std::size_t body = r.pos();
  const std::uint64_t checksum = r.u64();
  if (checksum != fnv1a(std::string_view(bytes).substr(0, body))) {
    throw Error(ErrorCode::kCorrupt, "agent artifact checksum mismatch");
  }
  try {
    s.validate();
    a.state_model = StateModel(s.variant, dim, std::move(centroids), fitted);
    a.q_table = QTable(k, actions, std::move(q));
    a.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorrupt, std::string("agent artifact content invalid: ") + e.what());
  }
  return a;
}

void save_agent(const AgentArtifact& agent, const std::filesystem::path& path) {
  const std::string bytes = serialize_agent(agent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write agent " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

AgentArtifact load_agent(const std::filesystem::path& path,
                         std::optional<std::uint64_t> expected_fingerprint, const WarningSink& warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open agent " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  AgentArtifact agent = deserialize_agent(buf.str());
  if (expected_fingerprint && *expected_fingerprint != agent.config_fingerprint && warn) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "agent %s was trained with config fingerprint %016llx, current config is %016llx",
                  path.filename().string().c_str(),
                  static_cast<unsigned long long>(agent.config_fingerprint),
                  static_cast<unsigned long long>(*expected_fingerprint));
    warn(msg);
  }
  return agent;
}

}  // namespace fhop
