// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omnivq/dataset_io.hpp"
#include "omnivq/frame.hpp"
#include "omnivq/harness.hpp"

namespace omnivq {

// Procedural ERP test videos with a planted quality model: each distorted
// video gets a DMOS that is a known smooth function of its mean
// full-frame GMSD and R-TI, plus Gaussian noise.
struct SynthOptions {
  int contents = 12;
  std::vector<double> levels = {1.0, 2.0, 3.0};  // distortion strengths
  int width = 128;
  int height = 64;
  int frames = 6;
  int bit_depth = 8;
  double dmos_noise = 2.0;
  std::uint64_t seed = 0;
};

struct SynthVideo {
  std::string video_id;
  std::string group_id;
  int content = 0;
  double level = 0.0;
  double blur_share = 0.0;  // 0 = pure noise, 1 = pure blur
  double gmsd = 0.0;        // mean over frames, full ERP frame
  double rti = 0.0;         // mean over frames 1..F-1
  double dmos = 0.0;
};

// The planted target without noise.
double synth_dmos(double gmsd, double rti);

std::vector<LumaFrame> synth_reference(int content, const SynthOptions& opts);
std::vector<LumaFrame> synth_distorted(const std::vector<LumaFrame>& reference,
                                       const SynthVideo& video, const SynthOptions& opts);

// Video descriptors with measured features and DMOS. Rows are ordered by
// content, then level.
std::vector<SynthVideo> make_synthetic_dataset(const SynthOptions& opts);

// Writes ref_<content>.y4m, <video_id>.y4m, manifest.json and split.txt
// (a grouped 80/20 split) into `dir`.
DatasetManifest write_synthetic_dataset(const SynthOptions& opts, const std::string& dir);

}  // namespace omnivq
