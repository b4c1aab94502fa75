// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "omnivq/feature_id.hpp"
#include "omnivq/feature_tensor.hpp"

namespace omnivq {

enum class PoolingKind { kHvs, kMean, kMinkowski, kPercentile };

std::string_view to_string(PoolingKind kind);
PoolingKind parse_pooling_kind(std::string_view name);

struct PoolingConfig {
  PoolingKind kind = PoolingKind::kHvs;
  double alpha = 0.03;  // low-pass gain when the score falls (or holds)
  double beta = 0.2;    // low-pass gain when the score rises
  std::optional<double> tau;  // recency time constant in frames; F/3 if unset
  double p = 2.0;             // Minkowski order
  double k_percent = 10.0;    // share of worst frames for percentile pooling
  // Divide the recency-weighted sum by F instead of by the weight sum.
  bool literal_normalization = false;
};

void validate(const PoolingConfig& cfg);

// Smoothing + asymmetric low-pass recursion followed by exponential recency
// weighting w(f) = exp((f + 1 - F) / tau), f = 0..F-1.
double hvs_pool(std::span<const double> series, const PoolingConfig& cfg = {});

double mean_pool(std::span<const double> series);

// (mean of q^p)^(1/p). Negative samples are rejected unless p is an integer.
double minkowski_pool(std::span<const double> series, double p);

// Mean of the worst ceil(F * k / 100) samples, "worst" per polarity.
double percentile_pool(std::span<const double> series, double k_percent,
                       Polarity polarity);

double pool_series(std::span<const double> series, const PoolingConfig& cfg,
                   FeatureId id);

// Pools every (viewport, feature) series. Temporal features have no value
// at frame 0 (it is stored as 0), so their series start at frame 1 whenever
// the video has more than one frame.
PooledFeatureVector pool_tensor(const FeatureTensor& tensor,
                                const PoolingConfig& cfg);

}  // namespace omnivq
