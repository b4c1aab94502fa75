// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <gtest/gtest.h>

#include <filesystem>

#include "omnivq/dataset_io.hpp"
#include "omnivq/frame_source.hpp"
#include "omnivq/synthetic.hpp"

using namespace omnivq;
namespace fs = std::filesystem;

namespace {

SynthOptions small() {
  SynthOptions o;
  o.contents = 4;
  o.width = 64;
  o.height = 32;
  o.frames = 3;
  o.dmos_noise = 0.0;
  o.seed = 3;
  return o;
}

}  // namespace

TEST(Synthetic, Deterministic) {
  const auto a = make_synthetic_dataset(small());
  const auto b = make_synthetic_dataset(small());
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].video_id, b[i].video_id);
    EXPECT_EQ(a[i].dmos, b[i].dmos);
  }
  EXPECT_EQ(a[0].video_id, "c00_d1");
  EXPECT_EQ(a[5].video_id, "c01_d3");
  EXPECT_EQ(a[5].group_id, "c01");
  SynthOptions other = small();
  other.seed = 4;
  EXPECT_NE(make_synthetic_dataset(other)[0].dmos, a[0].dmos);
}

TEST(Synthetic, StrongerDistortionScoresWorse) {
  const auto videos = make_synthetic_dataset(small());
  for (std::size_t i = 0; i < videos.size(); i += 3) {
    EXPECT_LT(videos[i].gmsd, videos[i + 2].gmsd);
    EXPECT_LT(videos[i].dmos, videos[i + 2].dmos);
  }
  EXPECT_DOUBLE_EQ(synth_dmos(0.0, 0.0), 10.0);
  EXPECT_LT(synth_dmos(0.01, 0.1), synth_dmos(0.02, 0.1));
  EXPECT_LT(synth_dmos(0.01, 0.1), synth_dmos(0.01, 0.2));
}

TEST(Synthetic, ReferenceWrapsAtTheSeam) {
  SynthOptions o = small();
  const auto ref = synth_reference(1, o);
  ASSERT_EQ(ref.size(), 3u);
  // Horizontal neighbours across the seam differ about as much as inside.
  double seam = 0.0, inner = 0.0;
  for (int y = 0; y < o.height; ++y) {
    seam += std::abs(ref[0](0, y) - ref[0](o.width - 1, y));
    inner += std::abs(ref[0](1, y) - ref[0](0, y));
  }
  EXPECT_LT(seam, 3.0 * inner + o.height);
}

TEST(Synthetic, WritesLoadableDataset) {
  const fs::path dir = fs::temp_directory_path() / "omnivq_synth_test";
  fs::remove_all(dir);
  const DatasetManifest written = write_synthetic_dataset(small(), dir.string());
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "split.txt"));
  EXPECT_TRUE(fs::exists(dir / "ref_c00.y4m"));
  EXPECT_TRUE(fs::exists(dir / "c03_d3.y4m"));
  const DatasetManifest loaded = load_manifest((dir / "manifest.json").string(), ManifestMode::kTraining);
  ASSERT_EQ(loaded.videos.size(), 12u);
  EXPECT_EQ(loaded.videos[4].dmos, written.videos[4].dmos);
  const auto frames = read_all_frames(loaded.videos[4].distorted_path, {});
  EXPECT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0].width(), 64);
}
