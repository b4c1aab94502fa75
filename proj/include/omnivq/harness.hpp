// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnivq/evaluation.hpp"
#include "omnivq/regression.hpp"

namespace omnivq {

// Plain-text split file: video ids one per line under "[train]" and "[test]"
// headings. Blank lines and lines starting with '#' are ignored.
struct SplitFile {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

SplitFile parse_split_file(std::string_view text);
SplitFile read_split_file(const std::string& path);
std::string split_file_to_text(const SplitFile& split);

// Harnesses announce each phase ("fit", "tune", "train", "test", "baseline")
// before reading the rows it needs. "fit" copies the training rows out of the
// source; tuning and training then work on that copy only.
class HarnessObserver {
 public:
  virtual ~HarnessObserver() = default;
  virtual void on_phase(std::string_view phase) { (void)phase; }
};

struct LearnerConfig {
  ModelKind kind = ModelKind::kRfr;
  // Empty: default_grid(kind). One entry: used as is, no tuning.
  std::vector<Hyperparams> grid;
  int tune_repeats = 5;
  double tune_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct FittedLearner {
  std::optional<TuneReport> tuning;
  QualityModel model;
};

// Tunes on `train` only (when the grid has several points), then fits.
FittedLearner fit_learner(const TrainingSet& train, const LearnerConfig& cfg,
                          HarnessObserver* observer = nullptr);

struct MethodResult {
  std::string method;  // model kind, or the baseline column name
  EvalReport report;
  std::optional<Logistic4Params> logistic;  // baselines only
  std::vector<std::string> video_ids;       // test rows
  std::vector<double> predictions;
  std::vector<double> targets;
};

struct SplitResult {
  std::vector<MethodResult> methods;  // learned model first, then baselines
  std::optional<TuneReport> tuning;
  QualityModel model;
  std::vector<std::string> warnings;
};

// Baseline: one pooled column mapped to the target scale with a logistic
// fitted on train rows, evaluated on test rows.
MethodResult evaluate_baseline(const TrainingSet& train, const TrainingSet& test,
                               const std::string& column);

// Throws overlap-between-splits when an id is listed on both sides.
SplitResult run_fixed_split(const RowSource& data, const SplitFile& split,
                            const LearnerConfig& cfg,
                            std::span<const std::string> baseline_columns = {},
                            HarnessObserver* observer = nullptr);

struct CvResult {
  EvalReport mean;  // averages over valid repeats
  int valid_repeats = 0;
  int excluded_repeats = 0;
  std::vector<int> repeat;  // index of each valid repeat
  std::vector<double> plcc;
  std::vector<double> srocc;
  std::vector<double> rmse;
  std::vector<int> excluded;  // repeats with undefined correlation
};

// Repeated grouped shuffle splits. Repeat r uses derive_seed(seed, r), so a
// repeat's outcome does not depend on which other repeats run.
CvResult run_repeated_cv(const RowSource& data, const LearnerConfig& cfg, int n_repeats,
                         double test_fraction, std::uint64_t seed,
                         HarnessObserver* observer = nullptr);

// Fits on all of `train`, evaluates on all of `test`. Throws layout-mismatch
// when the two sides have different feature layouts.
SplitResult run_cross_dataset(const RowSource& train, const RowSource& test,
                              const LearnerConfig& cfg,
                              std::span<const std::string> baseline_columns = {},
                              HarnessObserver* observer = nullptr);

// Exports.
std::string to_json(const EvalReport& report);
std::string split_result_to_json(const SplitResult& result);
std::string predictions_to_csv(const MethodResult& result);
std::string cv_result_to_json(const CvResult& result);
std::string cv_repeats_to_csv(const CvResult& result);
std::string tune_report_to_json(const TuneReport& report, ModelKind kind);
std::string sffs_to_json(const std::vector<SffsStep>& steps);
std::string sffs_to_csv(const std::vector<SffsStep>& steps);

}  // namespace omnivq
