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
#ifndef FHOP_RL_CORE_HPP_
#define FHOP_RL_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fhop/detection_metrics.hpp"
#include "fhop/frame_io.hpp"
#include "fhop/rng.hpp"
#include "fhop/skip_trace.hpp"
#include "fhop/state_space.hpp"

namespace fhop {

// States x actions table of action values; action a means "skip a frames".
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions, double init = 0.0);
  // Throws kValidation on shape mismatch or non-finite entries.
  QTable(std::size_t states, std::size_t actions, std::vector<double> values);

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  double at(std::size_t s, std::size_t a) const;
  double& at(std::size_t s, std::size_t a);
  std::span<const double> row(std::size_t s) const;
  const std::vector<double>& values() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t offset(std::size_t s, std::size_t a) const;

  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

// Which distance the reward sees for a skip of k frames after frame i.
enum class RewardMode : std::uint32_t {
  kMax = 0,         // max_j D(i, i+j), j = 1..k
  kLanded = 1,      // D(i, i+k)
  kCumulative = 2,  // skip_error(i, k) / k
};

enum class Exploration : std::uint32_t {
  // Every feasible action is tried at each reference frame; the walk then
  // continues along the action drawn by the epsilon-greedy policy.
  kSweep = 0,
  // One epsilon-greedy action per reference frame.
  kWalk = 1,
};

enum class AlphaSchedule : std::uint32_t {
  kConstant = 0,  // alpha on every update
  kHarmonic = 1,  // 1 / (number of updates of that entry so far)
};

// Exploration rate across training epochs.
enum class EpsilonSchedule : std::uint32_t {
  kConstant = 0,  // epsilon for every epoch
  kLinear = 1,    // epsilon down to 0 at the last epoch
};

const char* to_string(RewardMode m);
RewardMode reward_mode_from_string(const std::string& s);
const char* to_string(Exploration e);
Exploration exploration_from_string(const std::string& s);
const char* to_string(AlphaSchedule a);
AlphaSchedule alpha_schedule_from_string(const std::string& s);
const char* to_string(EpsilonSchedule e);
EpsilonSchedule epsilon_schedule_from_string(const std::string& s);

struct RLConfig {
  double alpha = 0.1;
  AlphaSchedule alpha_schedule = AlphaSchedule::kConstant;
  double gamma = 0.9;
  double psi1 = 1.0;
  double psi2 = 1.0;
  double theta = 0.2;
  int k_max = 30;
  int epochs = 20;
  double epsilon = 1.0;
  EpsilonSchedule epsilon_schedule = EpsilonSchedule::kLinear;
  Exploration exploration = Exploration::kSweep;
  RewardMode reward_mode = RewardMode::kMax;
  double iou_threshold = kDefaultIouThreshold;

  void validate() const;
};

// Exploration rate used in the given epoch.
double epoch_epsilon(const RLConfig& cfg, int epoch);

double compute_reward(double d, double theta, std::size_t k, double psi1, double psi2);

double skip_distance(const DetectionLog& log, std::size_t i, std::size_t k, RewardMode mode,
                     double iou_threshold = kDefaultIouThreshold);

void sarsa_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next,
                  std::size_t a_next, double alpha, double gamma);

// Row argmax; ties go to the smallest action.
std::size_t choose_action(const QTable& q, std::size_t s);

// ---------------------------------------------------------------------------
// Generic SARSA over an episodic environment.

struct Outcome {
  double reward = 0;
  std::size_t next_state = 0;
};

class Environment {
 public:
  virtual ~Environment() = default;
  // Starts an episode and returns its first state.
  virtual std::size_t reset() = 0;
  virtual std::size_t state() const = 0;
  // False when the action cannot be taken from the current position; an
  // episode ends the first time the chosen action is infeasible.
  virtual bool feasible(std::size_t action) const = 0;
  // Result of the action from the current position, without moving.
  virtual Outcome peek(std::size_t action) = 0;
  virtual void advance(std::size_t action) = 0;
};

using Policy = std::function<std::size_t(const QTable& q, std::size_t state, Rng& rng)>;

Policy epsilon_greedy(double epsilon);

struct SarsaOptions {
  double alpha = 0.1;
  AlphaSchedule alpha_schedule = AlphaSchedule::kConstant;
  double gamma = 0.9;
  Exploration exploration = Exploration::kWalk;
  std::size_t max_steps = SIZE_MAX;
};

class SarsaLearner {
 public:
  SarsaLearner(QTable q, SarsaOptions options);

  // Runs one episode and returns the number of Q updates applied. When
  // first_action is set it overrides the policy for the opening step.
  std::size_t run_episode(Environment& env, const Policy& policy, Rng& rng,
                          std::optional<std::size_t> first_action = std::nullopt);

  const QTable& q() const { return q_; }
  QTable release() && { return std::move(q_); }

 private:
  void update(std::size_t s, std::size_t a, const Outcome& o, std::size_t a_next);

  QTable q_;
  SarsaOptions options_;
  std::vector<std::uint64_t> visits_;
};

// ---------------------------------------------------------------------------
// Frame-skipping environment.

// State features for a pair of frame indices. Pixel sources never see detections.
class FeatureSource {
 public:
  virtual ~FeatureSource() = default;
  virtual std::size_t size() const = 0;
  virtual StateFeature observe(std::size_t prev, std::size_t next) const = 0;
};

class PixelFeatureSource : public FeatureSource {
 public:
  PixelFeatureSource(std::span<const Frame> frames, StateConfig cfg);
  std::size_t size() const override { return frames_.size(); }
  StateFeature observe(std::size_t prev, std::size_t next) const override;

 private:
  std::span<const Frame> frames_;
  StateConfig cfg_;
};

class DetectionFeatureSource : public FeatureSource {
 public:
  DetectionFeatureSource(const DetectionLog& log, StateConfig cfg, double iou_threshold);
  std::size_t size() const override { return log_.size(); }
  StateFeature observe(std::size_t prev, std::size_t next) const override;

 private:
  const DetectionLog& log_;
  StateConfig cfg_;
  double iou_threshold_;
};

std::unique_ptr<FeatureSource> make_feature_source(std::span<const Frame> frames,
                                                   const DetectionLog* log,
                                                   const StateConfig& cfg, double iou_threshold);

// Features the state model is fitted on, in frame order: one per frame t,
// paired with a frame a random 1..k_max+1 ahead (processed pairing) or with
// t+1 (consecutive pairing).
std::vector<StateFeature> clustering_stream(const FeatureSource& source, const StateConfig& cfg,
                                            int k_max, std::uint64_t seed);

class SkipEnvironment : public Environment {
 public:
  SkipEnvironment(const FeatureSource& source, const DetectionLog& log, const StateModel& model,
                  const StateConfig& state_cfg, const RLConfig& rl_cfg);

  std::size_t reset() override;
  std::size_t state() const override { return state_; }
  bool feasible(std::size_t action) const override;
  Outcome peek(std::size_t action) override;
  void advance(std::size_t action) override;

  std::size_t position() const { return position_; }

 private:
  double distance(std::size_t k);
  std::size_t observe_state(std::size_t prev, std::size_t next);

  const FeatureSource& source_;
  const DetectionLog& log_;
  const StateModel& model_;
  StateConfig state_cfg_;
  RLConfig rl_cfg_;
  std::size_t position_ = 0;
  std::size_t state_ = 0;
  // Distances D(position, position + j) for j = 1.. computed so far.
  std::vector<double> distances_;
  std::unordered_map<std::uint64_t, std::size_t> state_cache_;
};

// Trains Q over the given frames/log (already restricted to the training
// range) with a frozen state model. Deterministic for a given seed.
QTable train(const FeatureSource& source, const DetectionLog& log, const StateModel& model,
             const StateConfig& state_cfg, const RLConfig& cfg, std::uint64_t seed);

// Greedy inference: frame 0 is processed and paired with itself, then each
// processed frame is paired with the previous processed frame.
SkipTrace run_policy(const FeatureSource& source, const StateModel& model, const QTable& q);

}  // namespace fhop

#endif  // FHOP_RL_CORE_HPP_
