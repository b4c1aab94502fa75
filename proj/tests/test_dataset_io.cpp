// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "omnivq/dataset_io.hpp"
#include "omnivq/error.hpp"
#include "omnivq/frame_source.hpp"
#include "omnivq/spatial_metrics.hpp"
#include "oracles.hpp"

using namespace omnivq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "omnivq_dataset_io" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

std::vector<LumaFrame> texture_video(int frames, int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LumaFrame> out;
  for (int f = 0; f < frames; ++f) out.push_back(oracle::textured_frame(rng, w, h, 6.0));
  return out;
}

std::vector<LumaFrame> add_noise(const std::vector<LumaFrame>& v, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  std::vector<LumaFrame> out;
  for (const auto& f : v) {
    Plane p = f.plane();
    for (double& x : p.values()) x = std::clamp(std::round(x + sigma * n(rng)), 0.0, 255.0);
    out.emplace_back(p, 8);
  }
  return out;
}

FeatureTensor features_of(const std::vector<LumaFrame>& ref, const std::vector<LumaFrame>& dist,
                          const FeatureConfig& cfg) {
  VectorFrameSource r(ref), d(dist);
  return compute_features(r, d, cfg, {"v", "g", 1.0});
}

const char* kOneVideo = R"({"videos": [{"video_id": "a1", "group_id": "a",
  "reference_path": "ref.y4m", "distorted_path": "dist.y4m", "frame_count": 2,
  "width": 16, "height": 8, "bit_depth": 8, "dmos": 42.5}]})";

}  // namespace

TEST(Manifest, MinimalEntryLoads) {
  const DatasetManifest m = parse_manifest(kOneVideo, "/data", ManifestMode::kTraining, false);
  ASSERT_EQ(m.videos.size(), 1u);
  EXPECT_EQ(m.videos[0].reference_path, (fs::path("/data") / "ref.y4m").string());
  EXPECT_EQ(*m.videos[0].dmos, 42.5);
  EXPECT_TRUE(m.warnings.empty());
}

TEST(Manifest, Errors) {
  const std::string no_dmos = R"({"videos": [{"video_id": "a1", "group_id": "a",
    "reference_path": "r", "distorted_path": "d", "frame_count": 1, "width": 16,
    "height": 8}]})";
  EXPECT_EQ(kind_of([&] { parse_manifest(no_dmos, ".", ManifestMode::kTraining, false); }),
            ErrorKind::kMissingField);
  EXPECT_NO_THROW(parse_manifest(no_dmos, ".", ManifestMode::kInference, false));
  std::string dup = kOneVideo;
  dup.replace(dup.find('['), 1, std::string("[") + R"({"video_id": "a1", "group_id": "b",
    "reference_path": "r", "distorted_path": "d", "frame_count": 1, "width": 16,
    "height": 8, "dmos": 1},)");
  EXPECT_EQ(kind_of([&] { parse_manifest(dup, ".", ManifestMode::kTraining, false); }),
            ErrorKind::kDuplicateId);
  EXPECT_EQ(kind_of([&] { parse_manifest(kOneVideo, scratch("dangling").string()); }),
            ErrorKind::kDanglingPath);
  EXPECT_EQ(kind_of([&] { parse_manifest("{", ".", ManifestMode::kTraining, false); }),
            ErrorKind::kParseError);
  EXPECT_FALSE(valid_video_id("a/b"));
  EXPECT_TRUE(valid_video_id("A-1_b.c"));
}

TEST(Manifest, AspectWarning) {
  std::string text = kOneVideo;
  text.replace(text.find("\"height\": 8"), 11, "\"height\": 9");
  const DatasetManifest m = parse_manifest(text, ".", ManifestMode::kTraining, false);
  EXPECT_EQ(m.warnings.size(), 1u);
}

TEST(Manifest, JsonRoundTrip) {
  const fs::path dir = scratch("manifest");
  const DatasetManifest m = parse_manifest(kOneVideo, dir.string(), ManifestMode::kTraining, false);
  const std::string text = manifest_to_json(m, dir.string());
  const DatasetManifest back = parse_manifest(text, dir.string(), ManifestMode::kTraining, false);
  EXPECT_EQ(back.videos[0].reference_path, m.videos[0].reference_path);
  EXPECT_EQ(manifest_to_json(back, dir.string()), text);
}

TEST(FeatureConfig, Validation) {
  FeatureConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.features.push_back(FeatureId::kWS_PSNR);
  EXPECT_THROW(validate(cfg), Error);
  cfg.mode = FeatureMode::kProjection;
  EXPECT_NO_THROW(validate(cfg));
  cfg = {};
  cfg.fov_deg = 200;
  EXPECT_EQ(kind_of([&] { validate(cfg); }), ErrorKind::kInvalidFov);
  EXPECT_EQ(feature_version_hash().size(), 16u);
  EXPECT_EQ(parse_feature_mode("per_viewport"), FeatureMode::kPerViewport);
}

TEST(ComputeFeatures, IdentityInEveryMode) {
  const auto ref = texture_video(3, 128, 64, 1);
  for (FeatureMode mode : {FeatureMode::kProjection, FeatureMode::kCollage, FeatureMode::kPerViewport}) {
    FeatureConfig cfg;
    cfg.mode = mode;
    cfg.pattern = PatternKind::kTropical;
    cfg.features = {FeatureId::kSA,   FeatureId::kPSNR,  FeatureId::kPSNR_HVS, FeatureId::kPSNR_HVS_M,
                    FeatureId::kSSIM, FeatureId::kMS_SSIM, FeatureId::kGMSD,   FeatureId::kR_TI,
                    FeatureId::kT_GMSD};
    if (mode == FeatureMode::kProjection) {
      cfg.features.push_back(FeatureId::kWS_PSNR);
      cfg.features.push_back(FeatureId::kS_PSNR);
      cfg.sphere_samples = 5000;
    }
    const FeatureTensor t = features_of(ref, ref, cfg);
    EXPECT_EQ(t.viewports, mode == FeatureMode::kPerViewport ? 16 : 1);
    for (int f = 0; f < t.frames; ++f) {
      for (int n = 0; n < t.viewports; ++n) {
        for (int k = 0; k < t.feature_count(); ++k) {
          const FeatureId id = cfg.features[k];
          const double v = t.at(f, n, k);
          if (id == FeatureId::kSSIM || id == FeatureId::kMS_SSIM) {
            EXPECT_NEAR(v, 1.0, 1e-9);
          } else if (polarity(id) == Polarity::kHigherBetter) {
            EXPECT_EQ(v, kPsnrCapDb) << feature_name(id);
          } else {
            EXPECT_NEAR(v, 0.0, 1e-9) << feature_name(id);
          }
        }
      }
    }
  }
}

TEST(ComputeFeatures, UniformPatternHas25Viewports) {
  const auto ref = texture_video(1, 128, 64, 2);
  FeatureConfig cfg;
  cfg.features = {FeatureId::kPSNR};
  EXPECT_EQ(features_of(ref, ref, cfg).viewports, 25);
}

TEST(ComputeFeatures, NoiseLadderRaisesGmsdEverywhere) {
  const auto ref = texture_video(4, 128, 64, 3);
  FeatureConfig cfg;
  cfg.pattern = PatternKind::kTropical;
  cfg.features = {FeatureId::kGMSD};
  std::vector<FeatureTensor> ladder;
  for (double sigma : {1.0, 3.0, 6.0, 12.0}) {
    ladder.push_back(features_of(ref, add_noise(ref, sigma, 7), cfg));
  }
  for (std::size_t s = 1; s < ladder.size(); ++s) {
    for (int f = 0; f < 4; ++f) {
      for (int n = 0; n < 16; ++n) EXPECT_GT(ladder[s].at(f, n, 0), ladder[s - 1].at(f, n, 0));
    }
  }
}

TEST(ComputeFeatures, TemporalFeaturesAreZeroAtFirstFrame) {
  const auto ref = texture_video(3, 64, 32, 4);
  FeatureConfig cfg;
  cfg.mode = FeatureMode::kProjection;
  cfg.features = {FeatureId::kR_TI, FeatureId::kT_GMSD};
  const FeatureTensor t = features_of(ref, add_noise(ref, 5.0, 1), cfg);
  EXPECT_EQ(t.at(0, 0, 0), 0.0);
  EXPECT_EQ(t.at(0, 0, 1), 0.0);
  EXPECT_GT(t.at(1, 0, 0), 0.0);
  EXPECT_GT(t.at(2, 0, 1), 0.0);
}

TEST(ComputeFeatures, ProjectionMatchesPerViewportWithIdentityRenderer) {
  const auto ref = texture_video(3, 64, 32, 5);
  const auto dist = add_noise(ref, 4.0, 2);
  FeatureConfig cfg;
  cfg.mode = FeatureMode::kProjection;
  const FeatureTensor proj = features_of(ref, dist, cfg);
  FeatureConfig vp = cfg;
  vp.mode = FeatureMode::kPerViewport;
  VectorFrameSource r(ref), d(dist);
  const SurfaceRenderer identity = [](const LumaFrame& f) { return std::vector<LumaFrame>{f}; };
  const FeatureTensor other =
      compute_features(r, d, identity, vp, make_provenance(vp, 64), {"v", "g", 1.0});
  EXPECT_EQ(other.values, proj.values);
}

TEST(ComputeFeatures, StreamsWithBoundedResidency) {
  const auto ref = texture_video(6, 64, 32, 6);
  VectorFrameSource r(ref), d(ref);
  FeatureConfig cfg;
  cfg.features = {FeatureId::kPSNR, FeatureId::kR_TI};
  cfg.pattern = PatternKind::kEquatorial;
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  compute_features(r, d, cfg, {"v", "g", {}}, [&](int) {
    seen.emplace_back(r.position(), d.position());
  });
  ASSERT_EQ(seen.size(), 6u);
  // Frame f is finished before frame f + 1 is read from either source.
  for (std::size_t f = 0; f < seen.size(); ++f) {
    EXPECT_EQ(seen[f].first, f + 1);
    EXPECT_EQ(seen[f].second, f + 1);
  }
}

TEST(ComputeFeatures, MismatchedInputs) {
  const auto ref = texture_video(3, 64, 32, 7);
  auto shorter = ref;
  shorter.pop_back();
  FeatureConfig cfg;
  cfg.features = {FeatureId::kPSNR};
  EXPECT_EQ(kind_of([&] { features_of(ref, shorter, cfg); }), ErrorKind::kFrameCountMismatch);
  EXPECT_EQ(kind_of([&] { features_of(ref, texture_video(3, 32, 16, 1), cfg); }),
            ErrorKind::kDimensionMismatch);
  EXPECT_EQ(kind_of([&] { features_of({}, {}, cfg); }), ErrorKind::kEmptyTensor);
}

TEST(FeatureCache, RoundTripIsByteIdentical) {
  const fs::path dir = scratch("cache");
  const auto ref = texture_video(2, 128, 64, 8);
  FeatureConfig cfg;
  cfg.pattern = PatternKind::kEquatorial;
  FeatureTensor t = features_of(ref, add_noise(ref, 3.0, 3), cfg);
  t.video_id = "clip";
  write_feature_cache(t, dir.string());
  const std::string csv = read_text_file(cache_csv_path(dir.string(), "clip"));
  const std::string side = read_text_file(cache_sidecar_path(dir.string(), "clip"));
  const FeatureTensor back = read_feature_cache(dir.string(), "clip");
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.provenance, t.provenance);
  EXPECT_EQ(tensor_to_csv(back), csv);
  EXPECT_EQ(tensor_sidecar_json(back), side);
  EXPECT_EQ(list_feature_caches(dir.string()), std::vector<std::string>{"clip"});

  Provenance stale = t.provenance;
  stale.fov_deg = 60.0;
  EXPECT_EQ(kind_of([&] { read_feature_cache(dir.string(), "clip", &stale); }),
            ErrorKind::kProvenanceMismatch);
}

TEST(FeatureCache, HandWrittenFixture) {
  const std::string csv =
      "frame,viewport,SA,R_TI\n"
      "0,0,1.5,0\n"
      "0,1,2.5,0\n"
      "1,0,3.25,0.125\n"
      "1,1,4,0.5\n";
  const std::string sidecar = R"({"schema_version": 1, "video_id": "fx", "group_id": "g",
    "dmos": null, "frames": 2, "viewports": 2,
    "provenance": {"mode": "vp", "pattern": "equatorial", "fov_deg": 40.0,
      "vp_width": 8, "vp_height": 8, "features": ["SA", "R_TI"],
      "feature_version": ")" + feature_version_hash() + "\"}}";
  const FeatureTensor t = tensor_from_cache_text(csv, sidecar);
  EXPECT_EQ(t.frames, 2);
  EXPECT_EQ(t.viewports, 2);
  EXPECT_FALSE(t.dmos);
  EXPECT_EQ(t.values, (std::vector<double>{1.5, 0, 2.5, 0, 3.25, 0.125, 4, 0.5}));
  EXPECT_EQ(t.at(1, 0, 1), 0.125);
  EXPECT_EQ(tensor_to_csv(t), csv);
  EXPECT_EQ(kind_of([&] { tensor_from_cache_text("frame,viewport,SA\n", sidecar); }),
            ErrorKind::kParseError);
}

TEST(PooledTable, RoundTripAndMissingDmos) {
  TrainingSet t;
  t.layout = {{FeatureId::kSA, FeatureId::kGMSD}, 2};
  t.rows.push_back({"a", "g1", {1.0 / 3, 2, 3, 4}, 10.5});
  t.rows.push_back({"b", "g2", {5, 6, 7, 8}, std::nan("")});
  const std::string text = pooled_table_to_csv(t);
  EXPECT_NE(text.find("b,g2,,5"), std::string::npos);
  const TrainingSet back = parse_pooled_table(text);
  EXPECT_EQ(back.layout, t.layout);
  EXPECT_EQ(back.rows[0].features, t.rows[0].features);
  EXPECT_TRUE(std::isnan(back.rows[1].dmos));
  EXPECT_EQ(pooled_table_to_csv(back), text);
}

TEST(PooledTable, PooledRowLayout) {
  FeatureTensor t;
  t.video_id = "x";
  t.group_id = "g";
  t.dmos = 3.0;
  t.frames = 1;
  t.viewports = 2;
  t.provenance.features = {FeatureId::kSA, FeatureId::kGMSD};
  t.values = {1, 2, 3, 4};
  const TrainingRow r = pooled_row(t, {});
  EXPECT_EQ(r.features, (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(r.dmos, 3.0);
}

TEST(Csv, SplitAndFormat) {
  EXPECT_EQ(split_csv_line("a,,b"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(format_double(std::nan("")), "");
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
}
