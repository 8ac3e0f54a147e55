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
#ifndef FHOP_STATE_SPACE_HPP_
#define FHOP_STATE_SPACE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fhop/detection_metrics.hpp"
#include "fhop/frame_io.hpp"

namespace fhop {

enum class FeatureVariant : std::uint32_t {
  kChunk = 0,      // per-chunk fraction of changed pixels
  kWhole = 1,      // whole-frame fraction of changed pixels
  kDetection = 2,  // (count change, 1 - F1) from detections
};

// Which frame pair an observation is computed from during training.
enum class FeaturePairing : std::uint32_t {
  kProcessed = 0,    // the two most recently processed frames
  kConsecutive = 1,  // the landing frame and the raw frame before it
};

const char* to_string(FeatureVariant v);
FeatureVariant feature_variant_from_string(const std::string& s);
const char* to_string(FeaturePairing p);
FeaturePairing feature_pairing_from_string(const std::string& s);

struct StateFeature {
  std::vector<double> values;
  FeatureVariant variant = FeatureVariant::kChunk;
};

struct StateConfig {
  FeatureVariant variant = FeatureVariant::kChunk;
  int grid_rows = 3;
  int grid_cols = 3;
  // A pixel counts as changed when |prev - next| exceeds this.
  int pixel_change_threshold = 30;
  int k = 10;
  int minibatch_size = 30;
  double segment_seconds = 3.0;
  double fps = 30.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  FeaturePairing pairing = FeaturePairing::kProcessed;

  void validate() const;
  std::size_t feature_dimension() const;
  // Features per clustering segment, at least 1.
  std::size_t segment_length() const;
};

// Fitted centroids; maps a feature to the nearest centroid's id.
class StateModel {
 public:
  StateModel() = default;
  // centroids is row-major k x dimension.
  StateModel(FeatureVariant variant, std::size_t dimension, std::vector<double> centroids,
             std::size_t fitted_samples);

  FeatureVariant variant() const { return variant_; }
  std::size_t k() const { return dimension_ == 0 ? 0 : centroids_.size() / dimension_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t fitted_samples() const { return fitted_samples_; }
  std::span<const double> centroid(std::size_t i) const {
    return {centroids_.data() + i * dimension_, dimension_};
  }
  const std::vector<double>& centroid_data() const { return centroids_; }

 private:
  FeatureVariant variant_ = FeatureVariant::kChunk;
  std::size_t dimension_ = 0;
  std::vector<double> centroids_;
  std::size_t fitted_samples_ = 0;
};

StateFeature chunk_diff_features(const Frame& prev, const Frame& next, const StateConfig& cfg);
StateFeature whole_diff_feature(const Frame& prev, const Frame& next, const StateConfig& cfg);
StateFeature detection_state_features(const DetectionLog& log, std::size_t i, std::size_t j,
                                      const StateConfig& cfg,
                                      double iou_threshold = kDefaultIouThreshold);

// One pass of minibatch k-means. The first max(k, minibatch_size) features
// seed the centroids by k-means++; the rest are consumed in minibatches that
// never straddle a segment boundary, each moving its centroids to the running
// mean of everything assigned to them so far.
StateModel fit_clusters(std::span<const StateFeature> stream, const StateConfig& cfg,
                        std::uint64_t seed);

// Nearest centroid, lowest id on ties.
std::size_t get_state(const StateModel& model, const StateFeature& feature);

}  // namespace fhop

#endif  // FHOP_STATE_SPACE_HPP_
