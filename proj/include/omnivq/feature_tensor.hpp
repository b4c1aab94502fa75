// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "omnivq/feature_id.hpp"

namespace omnivq {

enum class FeatureMode { kProjection, kCollage, kPerViewport };

std::string_view to_string(FeatureMode mode);
// Accepts "projection", "collage" and "vp" (alias "per_viewport").
FeatureMode parse_feature_mode(std::string_view name);

// Configuration that produced a tensor. Caches are only reused when the
// provenance of the cache equals the provenance of the current run.
struct Provenance {
  FeatureMode mode = FeatureMode::kPerViewport;
  std::string pattern;  // pattern kind name; "none" in projection mode
  double fov_deg = 0.0;
  int vp_width = 0;
  int vp_height = 0;
  std::vector<FeatureId> features;
  std::string feature_version;  // feature_version_hash()

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Per-video features indexed by (frame, viewport, feature), stored
// frame-major: index = (frame * viewports + viewport) * features + feature.
struct FeatureTensor {
  std::string video_id;
  std::string group_id;
  std::optional<double> dmos;
  int frames = 0;
  int viewports = 0;
  Provenance provenance;
  std::vector<double> values;

  int feature_count() const { return static_cast<int>(provenance.features.size()); }
  std::size_t index(int frame, int viewport, int feature) const {
    return (static_cast<std::size_t>(frame) * viewports + viewport) *
               feature_count() + feature;
  }
  double at(int frame, int viewport, int feature) const {
    return values[index(frame, viewport, feature)];
  }
  double& at(int frame, int viewport, int feature) {
    return values[index(frame, viewport, feature)];
  }
};

// Concatenated pooled features of one video, viewport-major:
// index = viewport * features.size() + feature.
struct PooledFeatureVector {
  std::vector<FeatureId> features;
  int viewports = 0;
  std::vector<double> values;
};

}  // namespace omnivq
