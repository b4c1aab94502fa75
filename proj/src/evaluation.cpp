// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "omnivq/error.hpp"

namespace omnivq {
namespace {

void require_pairs(std::span<const double> x, std::span<const double> y,
                   const char* what) {
  if (x.size() != y.size()) {
    fail(ErrorKind::kLengthMismatch,
         std::string(what) + ": inputs differ in length (" +
             std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    fail(ErrorKind::kInvalidArgument, std::string(what) + " needs at least 2 pairs");
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double plcc(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, "plcc");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorKind::kZeroVariance, "correlation of a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double srocc(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, "srocc");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return plcc(rx, ry);
}

double rmse(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) {
    fail(ErrorKind::kLengthMismatch, "rmse: inputs differ in length");
  }
  if (prediction.empty()) fail(ErrorKind::kInvalidArgument, "rmse of empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(prediction.size()));
}

EvalReport evaluate(std::span<const double> prediction,
                    std::span<const double> target,
                    std::string split_descriptor) {
  EvalReport r;
  r.plcc = plcc(prediction, target);
  r.srocc = srocc(prediction, target);
  r.rmse = rmse(prediction, target);
  r.n = prediction.size();
  r.split_descriptor = std::move(split_descriptor);
  return r;
}

double apply_logistic4(const Logistic4Params& p, double score) {
  return (p.beta1 - p.beta2) / (1.0 + std::exp(-(score - p.beta3) / std::fabs(p.beta4))) +
         p.beta2;
}

std::vector<double> apply_logistic4(const Logistic4Params& p,
                                    std::span<const double> scores) {
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = apply_logistic4(p, scores[i]);
  return out;
}

Logistic4Params logistic4_initial_guess(std::span<const double> scores,
                                        std::span<const double> target) {
  Logistic4Params p;
  p.beta1 = *std::max_element(target.begin(), target.end());
  p.beta2 = *std::min_element(target.begin(), target.end());
  p.beta3 = median(std::vector<double>(scores.begin(), scores.end()));
  const double m = mean(scores);
  double ss = 0.0;
  for (double s : scores) ss += (s - m) * (s - m);
  p.beta4 = std::sqrt(ss / static_cast<double>(scores.size()));
  return p;
}

double logistic4_residual(const Logistic4Params& p,
                          std::span<const double> scores,
                          std::span<const double> target) {
  double ss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = apply_logistic4(p, scores[i]) - target[i];
    ss += d * d;
  }
  return ss;
}

std::vector<double> nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> start, const std::vector<double>& step,
    const NelderMeadOptions& opts) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        spread = std::max(spread, std::fabs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (values[worst] - values[best] <= opts.tolerance && spread <= opts.tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) {
        p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      }
      return p;
    };

    const auto reflected = along(-1.0);
    const double fr = f(reflected);
    if (fr < values[best]) {
      const auto expanded = along(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = f(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  return simplex[static_cast<std::size_t>(best_it - values.begin())];
}

Logistic4Params fit_logistic4(std::span<const double> scores,
                              std::span<const double> target,
                              const NelderMeadOptions& opts) {
  if (scores.size() != target.size()) {
    fail(ErrorKind::kLengthMismatch, "fit_logistic4: inputs differ in length");
  }
  if (scores.size() < 4) {
    fail(ErrorKind::kDegenerateInput, "fit_logistic4 needs at least 4 points");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (*lo == *hi) fail(ErrorKind::kDegenerateInput, "fit_logistic4 on constant scores");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]) || !std::isfinite(target[i])) {
      fail(ErrorKind::kNonFiniteInput, "fit_logistic4 on non-finite input");
    }
  }

  const Logistic4Params init = logistic4_initial_guess(scores, target);
  const double init_residual = logistic4_residual(init, scores, target);
  const double target_span = std::max(init.beta1 - init.beta2, 1e-6);
  const double score_span = std::max(init.beta4, 1e-6);
  const std::vector<double> start = {init.beta1, init.beta2, init.beta3, init.beta4};
  const std::vector<double> step = {0.1 * target_span, 0.1 * target_span,
                                    0.1 * score_span, 0.1 * score_span};
  auto objective = [&](std::span<const double> b) {
    if (b[3] == 0.0) return std::numeric_limits<double>::infinity();
    return logistic4_residual({b[0], b[1], b[2], b[3]}, scores, target);
  };
  const auto best = nelder_mead(objective, start, step, opts);
  const Logistic4Params fitted{best[0], best[1], best[2], best[3]};
  if (!(logistic4_residual(fitted, scores, target) < init_residual)) return init;
  return fitted;
}

std::size_t test_group_count(std::size_t n_groups, double test_fraction) {
  const auto k = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n_groups)));
  return std::clamp<std::size_t>(k, 1, n_groups - 1);
}

GroupSplit grouped_shuffle_split(std::span<const std::string> groups,
                                 double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "test fraction must lie in (0, 1)");
  }
  std::vector<std::string> distinct(groups.begin(), groups.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    fail(ErrorKind::kTooFewGroups, "grouped split needs at least 2 groups, got " +
                                       std::to_string(distinct.size()));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(distinct.begin(), distinct.end(), rng);
  const std::size_t k = test_group_count(distinct.size(), test_fraction);
  std::vector<std::string> test_groups(distinct.begin(), distinct.begin() + k);
  std::sort(test_groups.begin(), test_groups.end());

  GroupSplit split;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (std::binary_search(test_groups.begin(), test_groups.end(), groups[i])) {
      split.test.push_back(i);
    } else {
      split.train.push_back(i);
    }
  }
  return split;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace omnivq
