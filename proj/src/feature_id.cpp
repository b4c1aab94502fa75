// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/feature_id.hpp"

#include <string>

#include "omnivq/error.hpp"

namespace omnivq {

std::string_view feature_name(FeatureId id) {
  switch (id) {
    case FeatureId::kSA: return "SA";
    case FeatureId::kPSNR: return "PSNR";
    case FeatureId::kPSNR_HVS: return "PSNR_HVS";
    case FeatureId::kPSNR_HVS_M: return "PSNR_HVS_M";
    case FeatureId::kSSIM: return "SSIM";
    case FeatureId::kMS_SSIM: return "MS_SSIM";
    case FeatureId::kGMSD: return "GMSD";
    case FeatureId::kR_TI: return "R_TI";
    case FeatureId::kT_GMSD: return "T_GMSD";
    case FeatureId::kWS_PSNR: return "WS_PSNR";
    case FeatureId::kS_PSNR: return "S_PSNR";
  }
  return "?";
}

FeatureId parse_feature(std::string_view name) {
  for (FeatureId id : kAllFeatures) {
    if (feature_name(id) == name) return id;
  }
  // Accept the hyphenated spellings used in reports.
  std::string alt(name);
  for (char& c : alt) {
    if (c == '-') c = '_';
  }
  for (FeatureId id : kAllFeatures) {
    if (feature_name(id) == alt) return id;
  }
  fail(ErrorKind::kInvalidArgument, "unknown feature '" + std::string(name) + "'");
}

Polarity polarity(FeatureId id) {
  switch (id) {
    case FeatureId::kSA:
    case FeatureId::kGMSD:
    case FeatureId::kR_TI:
    case FeatureId::kT_GMSD:
      return Polarity::kHigherWorse;
    default:
      return Polarity::kHigherBetter;
  }
}

bool is_temporal(FeatureId id) {
  return id == FeatureId::kR_TI || id == FeatureId::kT_GMSD;
}

bool requires_erp(FeatureId id) {
  return id == FeatureId::kWS_PSNR || id == FeatureId::kS_PSNR;
}

std::vector<FeatureId> default_feature_set() {
  return {FeatureId::kSA,      FeatureId::kPSNR_HVS, FeatureId::kPSNR_HVS_M,
          FeatureId::kMS_SSIM, FeatureId::kGMSD,     FeatureId::kR_TI,
          FeatureId::kT_GMSD};
}

std::vector<FeatureId> parse_feature_list(std::string_view text) {
  std::vector<FeatureId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) out.push_back(parse_feature(token));
    start = end + 1;
  }
  if (out.empty()) fail(ErrorKind::kInvalidArgument, "empty feature list");
  return out;
}

}  // namespace omnivq
