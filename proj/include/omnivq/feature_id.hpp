// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace omnivq {

// Stable integer codes; serialized by name.
enum class FeatureId : int {
  kSA = 0,
  kPSNR = 1,
  kPSNR_HVS = 2,
  kPSNR_HVS_M = 3,
  kSSIM = 4,
  kMS_SSIM = 5,
  kGMSD = 6,
  kR_TI = 7,
  kT_GMSD = 8,
  kWS_PSNR = 9,
  kS_PSNR = 10,
};

inline constexpr std::array<FeatureId, 11> kAllFeatures = {
    FeatureId::kSA,      FeatureId::kPSNR,    FeatureId::kPSNR_HVS,
    FeatureId::kPSNR_HVS_M, FeatureId::kSSIM, FeatureId::kMS_SSIM,
    FeatureId::kGMSD,    FeatureId::kR_TI,    FeatureId::kT_GMSD,
    FeatureId::kWS_PSNR, FeatureId::kS_PSNR};

enum class Polarity { kHigherBetter, kHigherWorse };

struct FeatureSample {
  FeatureId id;
  double value;
};

std::string_view feature_name(FeatureId id);
FeatureId parse_feature(std::string_view name);
Polarity polarity(FeatureId id);
bool is_temporal(FeatureId id);
// Features defined only on equirectangular frames.
bool requires_erp(FeatureId id);

// SA, PSNR-HVS, PSNR-HVS-M, MS-SSIM, GMSD, R-TI, T-GMSD.
std::vector<FeatureId> default_feature_set();

std::vector<FeatureId> parse_feature_list(std::string_view comma_separated);

}  // namespace omnivq
