// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "omnivq/error.hpp"
#include "omnivq/evaluation.hpp"
#include "omnivq/geometry.hpp"
#include "omnivq/spatial_metrics.hpp"
#include "omnivq/temporal_metrics.hpp"

namespace omnivq {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kContentStream = 0x1000;
constexpr std::uint64_t kDistortionStream = 0x2000;
constexpr std::uint64_t kTargetStream = 0x3000;

struct Wave {
  double fx;  // integer cycles per frame width, keeps the ERP seam continuous
  double fy;
  double amplitude;
  double phase;
  double speed;  // radians per frame
};

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian blur, wrapping horizontally and clamping vertically.
Plane blur(const Plane& p, double sigma) {
  if (sigma <= 0.0) return p;
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = p.width(), h = p.height();
  Plane tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * p(((x + i) % w + w) % w, y);
      tmp(x, y) = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * tmp(x, std::clamp(y + i, 0, h - 1));
      out(x, y) = s;
    }
  }
  return out;
}

}  // namespace

double synth_dmos(double gmsd, double rti) {
  return 10.0 + 80.0 * (1.0 - std::exp(-(gmsd / 0.06 + rti / 0.6)));
}

std::vector<LumaFrame> synth_reference(int content, const SynthOptions& opts) {
  if (opts.width < 8 || opts.height < 4 || opts.frames < 1) {
    fail(ErrorKind::kInvalidArgument, "synthetic frames must be at least 8x4 with 1 frame");
  }
  std::mt19937_64 rng(derive_seed(opts.seed, kContentStream + static_cast<std::uint64_t>(content)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Wave> waves(6);
  const double detail = 0.5 + u(rng);  // overall texture frequency of this content
  for (auto& wv : waves) {
    wv.fx = std::round(1.0 + u(rng) * 10.0 * detail);
    wv.fy = 0.5 + u(rng) * 5.0 * detail;
    wv.amplitude = 6.0 + u(rng) * 10.0;
    wv.phase = 2.0 * kPi * u(rng);
    wv.speed = (0.15 + 0.6 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
  }
  const double scale = static_cast<double>((1 << opts.bit_depth) - 1) / 255.0;
  std::vector<LumaFrame> frames;
  frames.reserve(opts.frames);
  for (int t = 0; t < opts.frames; ++t) {
    Plane p(opts.width, opts.height);
    for (int y = 0; y < opts.height; ++y) {
      for (int x = 0; x < opts.width; ++x) {
        double v = 128.0;
        for (const auto& wv : waves) {
          v += wv.amplitude * std::sin(2.0 * kPi * (wv.fx * x / opts.width + wv.fy * y / opts.height) +
                                       wv.phase + wv.speed * t);
        }
        p(x, y) = std::clamp(std::round(v * scale), 0.0, 255.0 * scale);
      }
    }
    frames.emplace_back(std::move(p), opts.bit_depth);
  }
  return frames;
}

std::vector<LumaFrame> synth_distorted(const std::vector<LumaFrame>& reference,
                                       const SynthVideo& video, const SynthOptions& opts) {
  std::mt19937_64 rng(derive_seed(opts.seed, kDistortionStream +
                                                 static_cast<std::uint64_t>(video.content) * 64 +
                                                 static_cast<std::uint64_t>(video.level * 8.0)));
  std::normal_distribution<double> noise(0.0, 1.0);
  const double scale = static_cast<double>((1 << opts.bit_depth) - 1) / 255.0;
  const double sigma_blur = video.blur_share * 0.6 * video.level;
  const double sigma_noise = (1.0 - video.blur_share) * 3.0 * video.level * scale;
  std::vector<LumaFrame> out;
  out.reserve(reference.size());
  for (const auto& frame : reference) {
    Plane p = blur(frame.plane(), sigma_blur);
    for (double& v : p.values()) {
      v = std::clamp(std::round(v + sigma_noise * noise(rng)), 0.0, frame.max_value());
    }
    out.emplace_back(std::move(p), frame.bit_depth());
  }
  return out;
}

std::vector<SynthVideo> make_synthetic_dataset(const SynthOptions& opts) {
  if (opts.contents < 1 || opts.levels.empty()) {
    fail(ErrorKind::kInvalidArgument, "synthetic dataset needs contents and levels");
  }
  std::vector<SynthVideo> videos;
  for (int c = 0; c < opts.contents; ++c) {
    const auto ref = synth_reference(c, opts);
    std::mt19937_64 rng(derive_seed(opts.seed, kTargetStream + static_cast<std::uint64_t>(c)));
    std::uniform_real_distribution<double> share(0.0, 1.0);
    std::normal_distribution<double> target_noise(0.0, 1.0);
    for (std::size_t l = 0; l < opts.levels.size(); ++l) {
      SynthVideo v;
      char id[32];
      std::snprintf(id, sizeof id, "c%02d_d%zu", c, l + 1);
      v.video_id = id;
      std::snprintf(id, sizeof id, "c%02d", c);
      v.group_id = id;
      v.content = c;
      v.level = opts.levels[l];
      v.blur_share = share(rng);
      const auto dist = synth_distorted(ref, v, opts);
      double g = 0.0, r = 0.0;
      for (std::size_t f = 0; f < ref.size(); ++f) {
        g += gmsd(ref[f], dist[f]);
        if (f > 0) r += relative_ti({ref[f], ref[f - 1], dist[f], dist[f - 1]});
      }
      v.gmsd = g / static_cast<double>(ref.size());
      v.rti = ref.size() > 1 ? r / static_cast<double>(ref.size() - 1) : 0.0;
      v.dmos = synth_dmos(v.gmsd, v.rti) + opts.dmos_noise * target_noise(rng);
      videos.push_back(std::move(v));
    }
  }
  return videos;
}

DatasetManifest write_synthetic_dataset(const SynthOptions& opts, const std::string& dir) {
  fs::create_directories(dir);
  const auto videos = make_synthetic_dataset(opts);
  DatasetManifest manifest;
  manifest.path = (fs::path(dir) / "manifest.json").string();
  int written_content = -1;
  std::vector<LumaFrame> ref;
  for (const auto& v : videos) {
    const std::string ref_path = (fs::path(dir) / ("ref_" + v.group_id + ".y4m")).string();
    if (v.content != written_content) {
      ref = synth_reference(v.content, opts);
      write_y4m(ref_path, ref);
      written_content = v.content;
    }
    const std::string dist_path = (fs::path(dir) / (v.video_id + ".y4m")).string();
    write_y4m(dist_path, synth_distorted(ref, v, opts));
    VideoEntry e;
    e.video_id = v.video_id;
    e.group_id = v.group_id;
    e.reference_path = ref_path;
    e.distorted_path = dist_path;
    e.frame_count = opts.frames;
    e.width = opts.width;
    e.height = opts.height;
    e.bit_depth = opts.bit_depth;
    e.dmos = v.dmos;
    manifest.videos.push_back(std::move(e));
  }
  write_text_file(manifest.path, manifest_to_json(manifest, dir));

  std::vector<std::string> groups;
  for (const auto& v : videos) groups.push_back(v.group_id);
  if (opts.contents >= 2) {
    const GroupSplit split = grouped_shuffle_split(groups, 0.2, opts.seed);
    SplitFile file;
    for (std::size_t i : split.train) file.train.push_back(videos[i].video_id);
    for (std::size_t i : split.test) file.test.push_back(videos[i].video_id);
    write_text_file((fs::path(dir) / "split.txt").string(), split_file_to_text(file));
  }
  return manifest;
}

}  // namespace omnivq
