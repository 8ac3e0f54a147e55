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
#include "fhop/rl_core.hpp"

#include <algorithm>
#include <cmath>

#include "fhop/error.hpp"

namespace fhop {

QTable::QTable(std::size_t states, std::size_t actions, double init)
    : states_(states), actions_(actions), values_(states * actions, init) {
  if (states == 0 || actions == 0) throw Error(ErrorCode::kValidation, "Q-table needs rows and columns");
}

QTable::QTable(std::size_t states, std::size_t actions, std::vector<double> values)
    : states_(states), actions_(actions), values_(std::move(values)) {
  if (states == 0 || actions == 0 || values_.size() != states * actions) {
    throw Error(ErrorCode::kValidation, "Q-table values do not match " + std::to_string(states) + "x" +
                                            std::to_string(actions));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kValidation, "non-finite Q-value");
  }
}

std::size_t QTable::offset(std::size_t s, std::size_t a) const {
  if (s >= states_ || a >= actions_) {
    throw Error(ErrorCode::kRange, "Q-table index (" + std::to_string(s) + ", " + std::to_string(a) +
                                       ") outside " + std::to_string(states_) + "x" +
                                       std::to_string(actions_));
  }
  return s * actions_ + a;
}

double QTable::at(std::size_t s, std::size_t a) const { return values_[offset(s, a)]; }

double& QTable::at(std::size_t s, std::size_t a) { return values_[offset(s, a)]; }

std::span<const double> QTable::row(std::size_t s) const {
  if (s >= states_) throw Error(ErrorCode::kRange, "state " + std::to_string(s) + " out of range");
  return {values_.data() + s * actions_, actions_};
}

const char* to_string(RewardMode m) {
  switch (m) {
    case RewardMode::kMax: return "max";
    case RewardMode::kLanded: return "landed";
    case RewardMode::kCumulative: return "cumulative";
  }
  return "?";
}

RewardMode reward_mode_from_string(const std::string& s) {
  if (s == "max") return RewardMode::kMax;
  if (s == "landed") return RewardMode::kLanded;
  if (s == "cumulative") return RewardMode::kCumulative;
  throw Error(ErrorCode::kValidation, "unknown reward_mode '" + s + "' (max|landed|cumulative)");
}

const char* to_string(Exploration e) { return e == Exploration::kSweep ? "sweep" : "walk"; }

Exploration exploration_from_string(const std::string& s) {
  if (s == "sweep") return Exploration::kSweep;
  if (s == "walk") return Exploration::kWalk;
  throw Error(ErrorCode::kValidation, "unknown exploration '" + s + "' (sweep|walk)");
}

const char* to_string(AlphaSchedule a) {
  return a == AlphaSchedule::kConstant ? "constant" : "harmonic";
}

AlphaSchedule alpha_schedule_from_string(const std::string& s) {
  if (s == "constant") return AlphaSchedule::kConstant;
  if (s == "harmonic") return AlphaSchedule::kHarmonic;
  throw Error(ErrorCode::kValidation, "unknown alpha_schedule '" + s + "' (constant|harmonic)");
}

const char* to_string(EpsilonSchedule e) {
  return e == EpsilonSchedule::kConstant ? "constant" : "linear";
}

EpsilonSchedule epsilon_schedule_from_string(const std::string& s) {
  if (s == "constant") return EpsilonSchedule::kConstant;
  if (s == "linear") return EpsilonSchedule::kLinear;
  throw Error(ErrorCode::kValidation, "unknown epsilon_schedule '" + s + "' (constant|linear)");
}

double epoch_epsilon(const RLConfig& cfg, int epoch) {
  if (cfg.epsilon_schedule == EpsilonSchedule::kConstant || cfg.epochs <= 1) return cfg.epsilon;
  const int e = std::clamp(epoch, 0, cfg.epochs - 1);
  return cfg.epsilon * static_cast<double>(cfg.epochs - 1 - e) /
         static_cast<double>(cfg.epochs - 1);
}

void RLConfig::validate() const {
  if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorCode::kValidation, "alpha must be in (0, 1]");
  if (!(gamma >= 0 && gamma < 1)) throw Error(ErrorCode::kValidation, "gamma must be in [0, 1)");
  if (!(theta > 0 && theta < 1)) throw Error(ErrorCode::kValidation, "theta must be in (0, 1)");
  if (k_max < 1) throw Error(ErrorCode::kValidation, "k_max must be >= 1");
  if (epochs < 1) throw Error(ErrorCode::kValidation, "epochs must be >= 1");
  if (!(epsilon >= 0 && epsilon <= 1)) throw Error(ErrorCode::kValidation, "epsilon must be in [0, 1]");
  if (!std::isfinite(psi1) || !std::isfinite(psi2)) {
    throw Error(ErrorCode::kValidation, "psi weights must be finite");
  }
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw Error(ErrorCode::kValidation, "iou_threshold must be in (0, 1]");
  }
}

double compute_reward(double d, double theta, std::size_t k, double psi1, double psi2) {
  const auto kk = static_cast<double>(k);
  return d <= theta ? psi1 * (kk + 1.0) : -psi2 * kk;
}

double skip_distance(const DetectionLog& log, std::size_t i, std::size_t k, RewardMode mode,
                     double iou_threshold) {
  if (i >= log.size() || k >= log.size() - i) {
    throw Error(ErrorCode::kRange, "skip of " + std::to_string(k) + " after frame " +
                                       std::to_string(i) + " overflows log of " +
                                       std::to_string(log.size()));
  }
  if (k == 0) return 0.0;
  switch (mode) {
    case RewardMode::kMax: {
      double worst = 0.0;
      for (std::size_t j = 1; j <= k; ++j) {
        worst = std::max(worst, frame_distance(log, i, i + j, iou_threshold));
      }
      return worst;
    }
    case RewardMode::kLanded:
      return frame_distance(log, i, i + k, iou_threshold);
    case RewardMode::kCumulative:
      return skip_error(log, i, k, iou_threshold) / static_cast<double>(k);
  }
  return 0.0;
}

void sarsa_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next,
                  std::size_t a_next, double alpha, double gamma) {
  const double next = q.at(s_next, a_next);
  double& entry = q.at(s, a);
  entry = entry + alpha * (r + gamma * next - entry);
}

std::size_t choose_action(const QTable& q, std::size_t s) {
  const auto row = q.row(s);
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

Policy epsilon_greedy(double epsilon) {
  return [epsilon](const QTable& q, std::size_t state, Rng& rng) -> std::size_t {
    if (epsilon >= 1.0 || (epsilon > 0.0 && rng.uniform() < epsilon)) {
      return rng.index(q.actions());
    }
    return choose_action(q, state);
  };
}

// ---------------------------------------------------------------------------

SarsaLearner::SarsaLearner(QTable q, SarsaOptions options)
    : q_(std::move(q)), options_(options), visits_(q_.values().size(), 0) {}

void SarsaLearner::update(std::size_t s, std::size_t a, const Outcome& o, std::size_t a_next) {
  double alpha = options_.alpha;
  if (options_.alpha_schedule == AlphaSchedule::kHarmonic) {
    const std::uint64_t n = ++visits_[s * q_.actions() + a];
    alpha = 1.0 / static_cast<double>(n);
  }
  sarsa_update(q_, s, a, o.reward, o.next_state, a_next, alpha, options_.gamma);
}

std::size_t SarsaLearner::run_episode(Environment& env, const Policy& policy, Rng& rng,
                                      std::optional<std::size_t> first_action) {
  std::size_t s = env.reset();
  std::size_t a = first_action ? *first_action : policy(q_, s, rng);
  std::size_t updates = 0;
  std::size_t steps = 0;
  while (steps < options_.max_steps && env.feasible(a)) {
    const Outcome taken = env.peek(a);
    const std::size_t a_next = policy(q_, taken.next_state, rng);
    if (options_.exploration == Exploration::kSweep) {
      for (std::size_t b = 0; b < q_.actions(); ++b) {
        if (b == a) {
          update(s, a, taken, a_next);
        } else if (env.feasible(b)) {
          const Outcome alt = env.peek(b);
          update(s, b, alt, policy(q_, alt.next_state, rng));
        } else {
          continue;
        }
        ++updates;
      }
    } else {
      update(s, a, taken, a_next);
      ++updates;
    }
    env.advance(a);
    s = taken.next_state;
    a = a_next;
    ++steps;
  }
  return updates;
}

// ---------------------------------------------------------------------------

PixelFeatureSource::PixelFeatureSource(std::span<const Frame> frames, StateConfig cfg)
    : frames_(frames), cfg_(cfg) {
  if (cfg_.variant == FeatureVariant::kDetection) {
    throw Error(ErrorCode::kValidation, "pixel feature source cannot produce detection features");
  }
}

StateFeature PixelFeatureSource::observe(std::size_t prev, std::size_t next) const {
  if (prev >= frames_.size() || next >= frames_.size()) {
    throw Error(ErrorCode::kRange, "frame pair (" + std::to_string(prev) + ", " + std::to_string(next) +
                                       ") outside " + std::to_string(frames_.size()) + " frames");
  }
  return cfg_.variant == FeatureVariant::kChunk ? chunk_diff_features(frames_[prev], frames_[next], cfg_)
                                                : whole_diff_feature(frames_[prev], frames_[next], cfg_);
}

DetectionFeatureSource::DetectionFeatureSource(const DetectionLog& log, StateConfig cfg,
                                               double iou_threshold)
    : log_(log), cfg_(cfg), iou_threshold_(iou_threshold) {}

StateFeature DetectionFeatureSource::observe(std::size_t prev, std::size_t next) const {
  return detection_state_features(log_, prev, next, cfg_, iou_threshold_);
}

std::unique_ptr<FeatureSource> make_feature_source(std::span<const Frame> frames,
                                                   const DetectionLog* log,
                                                   const StateConfig& cfg, double iou_threshold) {
  if (cfg.variant == FeatureVariant::kDetection) {
    if (log == nullptr) {
      throw Error(ErrorCode::kValidation, "detection-based states need a detection log");
    }
    return std::make_unique<DetectionFeatureSource>(*log, cfg, iou_threshold);
  }
  return std::make_unique<PixelFeatureSource>(frames, cfg);
}

std::vector<StateFeature> clustering_stream(const FeatureSource& source, const StateConfig& cfg,
                                            int k_max, std::uint64_t seed) {
  const std::size_t n = source.size();
  std::vector<StateFeature> out;
  if (n < 2) return out;
  out.reserve(n - 1);
  Rng rng(seed);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    std::size_t next = t + 1;
    if (cfg.pairing == FeaturePairing::kProcessed) {
      const std::size_t gap = 1 + rng.index(static_cast<std::size_t>(k_max) + 1);
      next = std::min(n - 1, t + gap);
    }
    out.push_back(source.observe(t, next));
  }
  return out;
}

SkipEnvironment::SkipEnvironment(const FeatureSource& source, const DetectionLog& log,
                                 const StateModel& model, const StateConfig& state_cfg,
                                 const RLConfig& rl_cfg)
    : source_(source), log_(log), model_(model), state_cfg_(state_cfg), rl_cfg_(rl_cfg) {
  if (source_.size() != log_.size()) {
    throw Error(ErrorCode::kRange, "frames (" + std::to_string(source_.size()) +
                                       ") and detection log (" + std::to_string(log_.size()) +
                                       ") are not aligned");
  }
}

std::size_t SkipEnvironment::observe_state(std::size_t prev, std::size_t next) {
  const std::uint64_t key = static_cast<std::uint64_t>(prev) * (log_.size() + 1) + next;
  if (auto it = state_cache_.find(key); it != state_cache_.end()) return it->second;
  const std::size_t s = get_state(model_, source_.observe(prev, next));
  state_cache_.emplace(key, s);
  return s;
}

std::size_t SkipEnvironment::reset() {
  position_ = 0;
  distances_.clear();
  state_ = observe_state(0, 0);
  return state_;
}

bool SkipEnvironment::feasible(std::size_t action) const {
  return position_ + action + 1 < log_.size();
}

double SkipEnvironment::distance(std::size_t k) {
  while (distances_.size() < k) {
    const std::size_t j = distances_.size() + 1;
    distances_.push_back(frame_distance(log_, position_, position_ + j, rl_cfg_.iou_threshold));
  }
  if (k == 0) return 0.0;
  switch (rl_cfg_.reward_mode) {
    case RewardMode::kMax:
      return *std::max_element(distances_.begin(), distances_.begin() + static_cast<std::ptrdiff_t>(k));
    case RewardMode::kLanded:
      return distances_[k - 1];
    case RewardMode::kCumulative: {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += distances_[j];
      return sum / static_cast<double>(k);
    }
  }
  return 0.0;
}

Outcome SkipEnvironment::peek(std::size_t action) {
  if (!feasible(action)) throw Error(ErrorCode::kRange, "infeasible skip " + std::to_string(action));
  const double d = distance(action);
  const std::size_t landing = position_ + action + 1;
  const std::size_t prev =
      state_cfg_.pairing == FeaturePairing::kProcessed ? position_ : landing - 1;
  return {compute_reward(d, rl_cfg_.theta, action, rl_cfg_.psi1, rl_cfg_.psi2),
          observe_state(prev, landing)};
}

void SkipEnvironment::advance(std::size_t action) {
  const Outcome o = peek(action);
  position_ += action + 1;
  state_ = o.next_state;
  distances_.clear();
}

QTable train(const FeatureSource& source, const DetectionLog& log, const StateModel& model,
             const StateConfig& state_cfg, const RLConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (log.empty()) throw Error(ErrorCode::kEmpty, "empty training range");
  if (static_cast<std::size_t>(cfg.k_max) >= log.size()) {
    throw Error(ErrorCode::kValidation, "k_max (" + std::to_string(cfg.k_max) +
                                            ") must be below the training length (" +
                                            std::to_string(log.size()) + ")");
  }
  SkipEnvironment env(source, log, model, state_cfg, cfg);
  SarsaOptions opts;
  opts.alpha = cfg.alpha;
  opts.alpha_schedule = cfg.alpha_schedule;
  opts.gamma = cfg.gamma;
  opts.exploration = cfg.exploration;
  SarsaLearner learner(QTable(model.k(), static_cast<std::size_t>(cfg.k_max) + 1), opts);
  Rng rng(seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    learner.run_episode(env, epsilon_greedy(epoch_epsilon(cfg, epoch)), rng);
  }
  return std::move(learner).release();
}

SkipTrace run_policy(const FeatureSource& source, const StateModel& model, const QTable& q) {
  if (q.states() != model.k()) {
    throw Error(ErrorCode::kValidation, "Q-table rows do not match the state count");
  }
  SkipTrace::Builder builder(source.size());
  std::size_t prev = 0;
  while (!builder.done()) {
    const std::size_t current = builder.next_index();
    const std::size_t s = get_state(model, source.observe(prev, current));
    builder.process(choose_action(q, s));
    prev = current;
  }
  return std::move(builder).build();
}

}  // namespace fhop
