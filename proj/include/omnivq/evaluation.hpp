// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace omnivq {

struct EvalReport {
  double plcc = 0.0;
  double srocc = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  std::string split_descriptor;
};

// Pearson linear correlation. Throws zero-variance if either input is
// constant.
double plcc(std::span<const double> x, std::span<const double> y);

// Fractional ranks (1-based); ties share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> v);

// Spearman rank-order correlation: Pearson correlation of average ranks.
double srocc(std::span<const double> x, std::span<const double> y);

double rmse(std::span<const double> prediction, std::span<const double> target);

EvalReport evaluate(std::span<const double> prediction,
                    std::span<const double> target,
                    std::string split_descriptor = {});

// s' = (b1 - b2) / (1 + exp(-(S - b3) / |b4|)) + b2
struct Logistic4Params {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 1.0;
};

double apply_logistic4(const Logistic4Params& p, double score);
std::vector<double> apply_logistic4(const Logistic4Params& p,
                                    std::span<const double> scores);

// Starting point: b1 = max target, b2 = min target, b3 = median score,
// b4 = standard deviation of the scores.
Logistic4Params logistic4_initial_guess(std::span<const double> scores,
                                        std::span<const double> target);

double logistic4_residual(const Logistic4Params& p,
                          std::span<const double> scores,
                          std::span<const double> target);

struct NelderMeadOptions {
  int max_iterations = 2000;
  double tolerance = 1e-10;
};

// Least-squares fit by Nelder-Mead simplex search, started from
// logistic4_initial_guess(). The returned residual never exceeds the
// residual of the starting point.
Logistic4Params fit_logistic4(std::span<const double> scores,
                              std::span<const double> target,
                              const NelderMeadOptions& opts = {});

// Minimizes f over R^n; returns the best vertex found.
std::vector<double> nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> start, const std::vector<double>& step,
    const NelderMeadOptions& opts);

struct GroupSplit {
  std::vector<std::size_t> train;  // row indices, ascending
  std::vector<std::size_t> test;
};

// Number of test groups for a grouped split: round(fraction * groups),
// clamped to [1, groups - 1].
std::size_t test_group_count(std::size_t n_groups, double test_fraction);

// Group-level random partition: every row of a group lands on one side.
GroupSplit grouped_shuffle_split(std::span<const std::string> groups,
                                 double test_fraction, std::uint64_t seed);

// Deterministic per-repeat seed, independent of execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace omnivq
