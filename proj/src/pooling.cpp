// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "omnivq/error.hpp"

namespace omnivq {
namespace {

void require_nonempty(std::span<const double> series) {
  if (series.empty()) fail(ErrorKind::kEmptySeries, "cannot pool an empty series");
}

bool is_integer(double v) { return std::floor(v) == v; }

}  // namespace

std::string_view to_string(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kHvs: return "hvs";
    case PoolingKind::kMean: return "mean";
    case PoolingKind::kMinkowski: return "minkowski";
    case PoolingKind::kPercentile: return "percentile";
  }
  return "hvs";
}

PoolingKind parse_pooling_kind(std::string_view name) {
  if (name == "hvs") return PoolingKind::kHvs;
  if (name == "mean") return PoolingKind::kMean;
  if (name == "minkowski") return PoolingKind::kMinkowski;
  if (name == "percentile") return PoolingKind::kPercentile;
  fail(ErrorKind::kInvalidArgument, "unknown pooling '" + std::string(name) + "'");
}

void validate(const PoolingConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0) || !(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "pooling alpha and beta must lie in (0, 1]");
  }
  if (cfg.tau && !(*cfg.tau > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "pooling tau must be positive");
  }
  if (!(cfg.p >= 1.0)) fail(ErrorKind::kInvalidArgument, "Minkowski p must be >= 1");
  if (!(cfg.k_percent > 0.0 && cfg.k_percent <= 100.0)) {
    fail(ErrorKind::kInvalidArgument, "k_percent must lie in (0, 100]");
  }
}

double hvs_pool(std::span<const double> series, const PoolingConfig& cfg) {
  require_nonempty(series);
  const std::size_t frames = series.size();
  const double tau = cfg.tau.value_or(static_cast<double>(frames) / 3.0);

  double low_pass = series[0];
  double weighted = 0.0;
  double weight_sum = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (f > 0) {
      const double delta = series[f] - low_pass;
      low_pass += (delta <= 0.0 ? cfg.alpha : cfg.beta) * delta;
    }
    const double w =
        std::exp((static_cast<double>(f) + 1.0 - static_cast<double>(frames)) / tau);
    weighted += low_pass * w;
    weight_sum += w;
  }
  return cfg.literal_normalization ? weighted / static_cast<double>(frames)
                                   : weighted / weight_sum;
}

double mean_pool(std::span<const double> series) {
  require_nonempty(series);
  return std::accumulate(series.begin(), series.end(), 0.0) /
         static_cast<double>(series.size());
}

double minkowski_pool(std::span<const double> series, double p) {
  require_nonempty(series);
  if (!(p >= 1.0)) fail(ErrorKind::kInvalidArgument, "Minkowski p must be >= 1");
  const bool integer_order = is_integer(p);
  double sum = 0.0;
  for (double q : series) {
    if (q < 0.0 && !integer_order) {
      fail(ErrorKind::kNegativeInput,
           "Minkowski pooling of negative samples needs an integer order");
    }
    sum += std::pow(q, p);
  }
  const double mean = sum / static_cast<double>(series.size());
  // Odd integer orders keep the sign of the mean.
  return mean < 0.0 ? -std::pow(-mean, 1.0 / p) : std::pow(mean, 1.0 / p);
}

double percentile_pool(std::span<const double> series, double k_percent,
                       Polarity polarity) {
  require_nonempty(series);
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    fail(ErrorKind::kInvalidArgument, "k_percent must lie in (0, 100]");
  }
  std::vector<double> sorted(series.begin(), series.end());
  if (polarity == Polarity::kHigherBetter) {
    std::sort(sorted.begin(), sorted.end());
  } else {
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
  }
  const auto count = static_cast<std::size_t>(
      std::ceil(static_cast<double>(sorted.size()) * k_percent / 100.0 - 1e-9));
  const std::size_t take = std::clamp<std::size_t>(count, 1, sorted.size());
  return std::accumulate(sorted.begin(), sorted.begin() + take, 0.0) /
         static_cast<double>(take);
}

double pool_series(std::span<const double> series, const PoolingConfig& cfg,
                   FeatureId id) {
  switch (cfg.kind) {
    case PoolingKind::kHvs: return hvs_pool(series, cfg);
    case PoolingKind::kMean: return mean_pool(series);
    case PoolingKind::kMinkowski: return minkowski_pool(series, cfg.p);
    case PoolingKind::kPercentile:
      return percentile_pool(series, cfg.k_percent, polarity(id));
  }
  return 0.0;
}

PooledFeatureVector pool_tensor(const FeatureTensor& tensor,
                                const PoolingConfig& cfg) {
  validate(cfg);
  const int m = tensor.feature_count();
  if (tensor.frames < 1 || tensor.viewports < 1 || m < 1) {
    fail(ErrorKind::kEmptyTensor, "cannot pool an empty feature tensor");
  }
  if (tensor.values.size() !=
      static_cast<std::size_t>(tensor.frames) * tensor.viewports * m) {
    fail(ErrorKind::kInvalidArgument, "feature tensor is not rectangular");
  }

  PooledFeatureVector out;
  out.features = tensor.provenance.features;
  out.viewports = tensor.viewports;
  out.values.resize(static_cast<std::size_t>(tensor.viewports) * m);
  std::vector<double> series;
  for (int n = 0; n < tensor.viewports; ++n) {
    for (int k = 0; k < m; ++k) {
      const FeatureId id = out.features[k];
      const int first = is_temporal(id) && tensor.frames > 1 ? 1 : 0;
      series.clear();
      for (int f = first; f < tensor.frames; ++f) series.push_back(tensor.at(f, n, k));
      out.values[static_cast<std::size_t>(n) * m + k] = pool_series(series, cfg, id);
    }
  }
  return out;
}

}  // namespace omnivq
