// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omnivq/feature_tensor.hpp"
#include "omnivq/frame_source.hpp"
#include "omnivq/geometry.hpp"
#include "omnivq/pooling.hpp"
#include "omnivq/regression.hpp"
#include "omnivq/spatial_metrics.hpp"

namespace omnivq {

struct VideoEntry {
  std::string video_id;
  std::string group_id;
  std::string reference_path;  // resolved against the manifest directory
  std::string distorted_path;
  int frame_count = 0;
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::optional<double> dmos;
  std::string projection = "erp";

  FrameGeometry geometry() const { return {width, height, bit_depth, frame_count}; }
};

struct DatasetManifest {
  std::string path;
  std::vector<VideoEntry> videos;
  std::vector<std::string> warnings;
};

enum class ManifestMode { kTraining, kInference };

// JSON manifest:
//   {"videos": [{"video_id", "group_id", "reference_path", "distorted_path",
//                "frame_count", "width", "height", "bit_depth", "dmos",
//                "projection": "erp"}, ...]}
// Relative paths are taken from the manifest's directory. Training mode
// requires dmos on every entry.
DatasetManifest load_manifest(const std::string& path,
                              ManifestMode mode = ManifestMode::kTraining);
DatasetManifest parse_manifest(std::string_view text, const std::string& base_dir,
                               ManifestMode mode = ManifestMode::kTraining,
                               bool check_paths = true);
std::string manifest_to_json(const DatasetManifest& manifest, const std::string& base_dir);

// Video ids become file names, so they are restricted to [A-Za-z0-9._-].
bool valid_video_id(std::string_view id);

struct FeatureConfig {
  FeatureMode mode = FeatureMode::kPerViewport;
  PatternKind pattern = PatternKind::kUniform;
  double fov_deg = 40.0;
  int vp_width = 0;  // 0 = default_viewport_size
  int vp_height = 0;
  std::vector<FeatureId> features = default_feature_set();
  bool gmsd_downsample = false;
  std::int64_t sphere_samples = kDefaultSphereSamples;
};

void validate(const FeatureConfig& cfg);

// Hash over the metric constant tables and the feature code version; caches
// with another hash are stale.
std::string feature_version_hash();

Provenance make_provenance(const FeatureConfig& cfg, int erp_width);

// Frames of one video turned into the surfaces the metrics run on: the ERP
// frame itself, a collage, or one frame per viewport.
using SurfaceRenderer = std::function<std::vector<LumaFrame>(const LumaFrame& erp)>;
SurfaceRenderer make_surface_renderer(const FeatureConfig& cfg, int erp_width);

struct VideoMeta {
  std::string video_id;
  std::string group_id;
  std::optional<double> dmos;
};

// Called after frame f has been fully processed, before frame f + 1 is read.
using FrameObserver = std::function<void(int frame)>;

// Streams both sequences in lockstep. Temporal features compare each
// surface with the same surface of the previous frame and are 0 at frame 0.
FeatureTensor compute_features(FrameSource& ref, FrameSource& dist,
                               const FeatureConfig& cfg, const VideoMeta& meta,
                               const FrameObserver& on_frame_done = {});
FeatureTensor compute_features(FrameSource& ref, FrameSource& dist,
                               const SurfaceRenderer& renderer,
                               const FeatureConfig& cfg, const Provenance& provenance,
                               const VideoMeta& meta,
                               const FrameObserver& on_frame_done = {});
FeatureTensor compute_features(const VideoEntry& entry, const FeatureConfig& cfg,
                               const FrameObserver& on_frame_done = {});

// Feature cache: <dir>/<video_id>.features.csv with header
// "frame,viewport,<feature names>" and a JSON sidecar
// <dir>/<video_id>.features.json holding provenance, group and dmos.
std::string cache_csv_path(const std::string& dir, const std::string& video_id);
std::string cache_sidecar_path(const std::string& dir, const std::string& video_id);

std::string tensor_to_csv(const FeatureTensor& tensor);
std::string tensor_sidecar_json(const FeatureTensor& tensor);
FeatureTensor tensor_from_cache_text(std::string_view csv, std::string_view sidecar);

void write_feature_cache(const FeatureTensor& tensor, const std::string& dir);
// Throws provenance-mismatch when `expected` is given and differs.
FeatureTensor read_feature_cache(const std::string& dir, const std::string& video_id,
                                 const Provenance* expected = nullptr);
// Ids of all caches in a directory, sorted.
std::vector<std::string> list_feature_caches(const std::string& dir);

std::string to_json(const Provenance& p);
Provenance provenance_from_json(std::string_view text);

// Pooled table: "video_id,group_id,dmos,v0_<F>,..."; missing dmos is an
// empty cell and reads back as NaN.
TrainingRow pooled_row(const FeatureTensor& tensor, const PoolingConfig& cfg);
std::string pooled_table_to_csv(const TrainingSet& table);
TrainingSet parse_pooled_table(std::string_view text);
TrainingSet read_pooled_table(const std::string& path);
void write_pooled_table(const TrainingSet& table, const std::string& path);

// Generic CSV helpers shared by the tools.
std::vector<std::string> split_csv_line(std::string_view line);
std::string format_double(double v);  // %.17g; empty for NaN
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace omnivq
