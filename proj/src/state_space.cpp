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
#include "fhop/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fhop/error.hpp"
#include "fhop/rng.hpp"

namespace fhop {

const char* to_string(FeatureVariant v) {
  switch (v) {
    case FeatureVariant::kChunk: return "chunk";
    case FeatureVariant::kWhole: return "whole";
    case FeatureVariant::kDetection: return "detection";
  }
  return "?";
}

FeatureVariant feature_variant_from_string(const std::string& s) {
  if (s == "chunk") return FeatureVariant::kChunk;
  if (s == "whole") return FeatureVariant::kWhole;
  if (s == "detection") return FeatureVariant::kDetection;
  throw Error(ErrorCode::kValidation, "unknown feature variant '" + s + "' (chunk|whole|detection)");
}

const char* to_string(FeaturePairing p) {
  return p == FeaturePairing::kProcessed ? "processed" : "consecutive";
}

FeaturePairing feature_pairing_from_string(const std::string& s) {
  if (s == "processed") return FeaturePairing::kProcessed;
  if (s == "consecutive") return FeaturePairing::kConsecutive;
  throw Error(ErrorCode::kValidation, "unknown feature pairing '" + s + "' (processed|consecutive)");
}

void StateConfig::validate() const {
  if (grid_rows < 1 || grid_cols < 1) throw Error(ErrorCode::kValidation, "grid dimensions must be >= 1");
  if (pixel_change_threshold <= 0 || pixel_change_threshold >= 255) {
    throw Error(ErrorCode::kValidation, "pixel_change_threshold must be in (0, 255)");
  }
  if (k < 2) throw Error(ErrorCode::kValidation, "k must be >= 2");
  if (minibatch_size < 1) throw Error(ErrorCode::kValidation, "minibatch_size must be >= 1");
  if (!(segment_seconds > 0) || !(fps > 0)) {
    throw Error(ErrorCode::kValidation, "segment_seconds and fps must be positive");
  }
  if (!std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw Error(ErrorCode::kValidation, "beta weights must be finite");
  }
}

std::size_t StateConfig::feature_dimension() const {
  switch (variant) {
    case FeatureVariant::kChunk: return static_cast<std::size_t>(grid_rows) * grid_cols;
    case FeatureVariant::kWhole: return 1;
    case FeatureVariant::kDetection: return 2;
  }
  return 0;
}

std::size_t StateConfig::segment_length() const {
  return static_cast<std::size_t>(std::max(1L, std::lround(segment_seconds * fps)));
}

StateModel::StateModel(FeatureVariant variant, std::size_t dimension, std::vector<double> centroids,
                       std::size_t fitted_samples)
    : variant_(variant), dimension_(dimension), centroids_(std::move(centroids)),
      fitted_samples_(fitted_samples) {
  if (dimension_ == 0 || centroids_.empty() || centroids_.size() % dimension_ != 0) {
    throw Error(ErrorCode::kValidation, "centroid matrix does not match dimension");
  }
  if (fitted_samples_ < k()) {
    throw Error(ErrorCode::kValidation, "state model fitted on fewer samples than clusters");
  }
  for (double v : centroids_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kValidation, "non-finite centroid");
  }
}

namespace {

StateFeature grid_diff(const Frame& prev, const Frame& next, int rows, int cols, int threshold,
                       FeatureVariant tag) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw Error(ErrorCode::kDimension, "frame pair dimensions differ: " + std::to_string(prev.width()) +
                                           "x" + std::to_string(prev.height()) + " vs " +
                                           std::to_string(next.width()) + "x" +
                                           std::to_string(next.height()));
  }
  const int w = prev.width();
  const int h = prev.height();
  if (w < cols || h < rows) {
    throw Error(ErrorCode::kDimension, "frame smaller than the chunk grid");
  }
  const int cw = w / cols;
  const int ch = h / rows;
  std::vector<std::size_t> changed(static_cast<std::size_t>(rows) * cols, 0);
  const auto a = prev.pixels();
  const auto b = next.pixels();
  for (int y = 0; y < h; ++y) {
    const int r = std::min(rows - 1, y / ch);
    const std::size_t row_off = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const int d = std::abs(static_cast<int>(a[row_off + x]) - static_cast<int>(b[row_off + x]));
      if (d > threshold) ++changed[static_cast<std::size_t>(r) * cols + std::min(cols - 1, x / cw)];
    }
  }
  StateFeature f;
  f.variant = tag;
  f.values.resize(changed.size());
  for (int r = 0; r < rows; ++r) {
    const int chunk_h = r == rows - 1 ? h - r * ch : ch;
    for (int c = 0; c < cols; ++c) {
      const int chunk_w = c == cols - 1 ? w - c * cw : cw;
      const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
      f.values[idx] = static_cast<double>(changed[idx]) / (static_cast<double>(chunk_w) * chunk_h);
    }
  }
  return f;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const std::vector<double>& centroids, std::size_t dim,
                    std::span<const double> x) {
  const std::size_t k = centroids.size() / dim;
  std::size_t best = 0;
  double best_d = squared_distance({centroids.data(), dim}, x);
  for (std::size_t c = 1; c < k; ++c) {
    const double d = squared_distance({centroids.data() + c * dim, dim}, x);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<double> kmeans_plus_plus(std::span<const StateFeature> points, std::size_t k,
                                     std::size_t dim, Rng& rng) {
  std::vector<double> centroids;
  centroids.reserve(k * dim);
  auto add = [&](std::size_t i) {
    centroids.insert(centroids.end(), points[i].values.begin(), points[i].values.end());
  };
  add(rng.index(points.size()));
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    d2[i] = squared_distance(points[i].values, {centroids.data(), dim});
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(points.size());
    }
    add(pick);
    const std::span<const double> added{centroids.data() + c * dim, dim};
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i].values, added));
    }
  }
  return centroids;
}

}  // namespace

StateFeature chunk_diff_features(const Frame& prev, const Frame& next, const StateConfig& cfg) {
  return grid_diff(prev, next, cfg.grid_rows, cfg.grid_cols, cfg.pixel_change_threshold,
                   FeatureVariant::kChunk);
}

StateFeature whole_diff_feature(const Frame& prev, const Frame& next, const StateConfig& cfg) {
  return grid_diff(prev, next, 1, 1, cfg.pixel_change_threshold, FeatureVariant::kWhole);
}

StateFeature detection_state_features(const DetectionLog& log, std::size_t i, std::size_t j,
                                      const StateConfig& cfg, double iou_threshold) {
  const auto c_prev = static_cast<double>(log.at(i).size());
  const auto c_next = static_cast<double>(log.at(j).size());
  const double denom = std::max({c_prev, c_next, 1.0});
  StateFeature f;
  f.variant = FeatureVariant::kDetection;
  f.values = {cfg.beta1 * std::abs(c_prev - c_next) / denom,
              cfg.beta2 * (1.0 - f1_score(log.at(i), log.at(j), iou_threshold))};
  return f;
}

StateModel fit_clusters(std::span<const StateFeature> stream, const StateConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  const auto k = static_cast<std::size_t>(cfg.k);
  if (stream.size() < k) {
    throw Error(ErrorCode::kUnderflow, "clustering needs at least " + std::to_string(k) +
                                           " features, got " + std::to_string(stream.size()));
  }
  const std::size_t dim = cfg.feature_dimension();
  for (const StateFeature& f : stream) {
    if (f.values.size() != dim || f.variant != cfg.variant) {
      throw Error(ErrorCode::kDimension, "feature stream does not match the configured variant");
    }
  }

  Rng rng(seed);
  const std::size_t init_count =
      std::min(stream.size(), std::max(k, static_cast<std::size_t>(cfg.minibatch_size)));
  std::vector<double> centroids = kmeans_plus_plus(stream.first(init_count), k, dim, rng);

  std::vector<std::size_t> counts(k, 0);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> batch_counts(k);
  const std::size_t seg = cfg.segment_length();
  const auto batch = static_cast<std::size_t>(cfg.minibatch_size);
  std::size_t pos = init_count;
  while (pos < stream.size()) {
    const std::size_t seg_end = std::min(stream.size(), (pos / seg + 1) * seg);
    const std::size_t end = std::min(seg_end, pos + batch);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(batch_counts.begin(), batch_counts.end(), 0);
    for (std::size_t i = pos; i < end; ++i) {
      const std::size_t c = nearest(centroids, dim, stream[i].values);
      ++batch_counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += stream[i].values[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (batch_counts[c] == 0) continue;
      const auto old_n = static_cast<double>(counts[c]);
      counts[c] += batch_counts[c];
      const auto new_n = static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim; ++d) {
        double& v = centroids[c * dim + d];
        v = (old_n * v + sums[c * dim + d]) / new_n;
      }
    }
    pos = end;
  }
  return StateModel(cfg.variant, dim, std::move(centroids), stream.size());
}

std::size_t get_state(const StateModel& model, const StateFeature& feature) {
  if (feature.values.size() != model.dimension()) {
    throw Error(ErrorCode::kDimension, "feature of dimension " + std::to_string(feature.values.size()) +
                                           " for a model of dimension " +
                                           std::to_string(model.dimension()));
  }
  return nearest(model.centroid_data(), model.dimension(), feature.values);
}

}  // namespace fhop
