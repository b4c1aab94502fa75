// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include "omnivq/frame.hpp"
#include "omnivq/spatial_metrics.hpp"

namespace omnivq {

// Current and previous frames of the reference and distorted sequences.
struct FramePairWindow {
  const LumaFrame& ref_curr;
  const LumaFrame& ref_prev;
  const LumaFrame& dist_curr;
  const LumaFrame& dist_prev;
};

// Below this, a temporal information value counts as "no motion".
inline constexpr double kStaticTiEpsilon = 1e-8;
// R-TI value reported when the reference is static but the distorted
// sequence moves.
inline constexpr double kRelativeTiCap = 10.0;

// Population standard deviation of curr - prev.
double temporal_information(const LumaFrame& curr, const LumaFrame& prev);

// |TI_ref - TI_dist| / TI_ref, with the static-reference rules above.
double relative_ti(const FramePairWindow& w);

// GMSD between the signed reference and distorted frame differences.
double temporal_gmsd(const FramePairWindow& w, const GmsdOptions& opts = {});

}  // namespace omnivq
