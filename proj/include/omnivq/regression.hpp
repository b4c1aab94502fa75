// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omnivq/feature_id.hpp"

namespace omnivq {

// Column order of a pooled feature vector: viewport-major, feature-minor.
struct FeatureLayout {
  std::vector<FeatureId> features;
  int viewports = 1;

  std::size_t size() const { return features.size() * static_cast<std::size_t>(viewports); }
  // "v<viewport>_<FEATURE>" per column.
  std::vector<std::string> column_names() const;

  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

// Inverse of column_names(); throws parse-error on malformed headers.
FeatureLayout layout_from_columns(std::span<const std::string> columns);

struct TrainingRow {
  std::string video_id;
  std::string group_id;  // reference content id
  std::vector<double> features;
  double dmos = 0.0;
};

struct TrainingSet {
  FeatureLayout layout;
  std::vector<TrainingRow> rows;

  std::vector<std::string> groups() const;
  std::vector<double> targets() const;
  std::size_t distinct_groups() const;
};

// Read access to rows. Harnesses read data only through this interface, so
// tests can observe exactly which rows each phase touches.
class RowSource {
 public:
  virtual ~RowSource() = default;
  virtual const FeatureLayout& layout() const = 0;
  virtual std::size_t size() const = 0;
  virtual const TrainingRow& row(std::size_t index) const = 0;
  // Row identity without touching its features or target.
  virtual const std::string& video_id(std::size_t index) const = 0;
  virtual const std::string& group_id(std::size_t index) const = 0;
};

class TrainingSetSource : public RowSource {
 public:
  explicit TrainingSetSource(const TrainingSet& data) : data_(data) {}
  const FeatureLayout& layout() const override { return data_.layout; }
  std::size_t size() const override { return data_.rows.size(); }
  const TrainingRow& row(std::size_t index) const override { return data_.rows.at(index); }
  const std::string& video_id(std::size_t index) const override {
    return data_.rows.at(index).video_id;
  }
  const std::string& group_id(std::size_t index) const override {
    return data_.rows.at(index).group_id;
  }

 private:
  const TrainingSet& data_;
};

TrainingSet materialize(const RowSource& source, std::span<const std::size_t> indices);
TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> indices);

// Keeps the given feature ids (in layout order) for every viewport.
TrainingSet select_features(const TrainingSet& data, std::span<const FeatureId> ids);

enum class ModelKind { kRfr, kGbr, kSvr };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class MaxFeatures { kAll, kSqrt, kThird };

std::string_view to_string(MaxFeatures m);
MaxFeatures parse_max_features(std::string_view name);
int resolve_max_features(MaxFeatures m, int n_features);

// Union of the hyperparameters of all model kinds; each kind reads its own.
struct Hyperparams {
  // forests and boosting
  int n_trees = 100;
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 1;
  MaxFeatures max_features = MaxFeatures::kSqrt;
  bool bootstrap = true;
  double learning_rate = 0.1;  // boosting only
  // support vector regression (RBF kernel)
  double c = 10.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // 0 = 1 / n_features

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

std::string describe(ModelKind kind, const Hyperparams& hp);

// Grids searched by tune_hyperparams when none is given.
std::vector<Hyperparams> default_grid(ModelKind kind);

struct TreeNode {
  int feature_index = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature_index] <= threshold
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct TreeOptions {
  int max_depth = 0;
  int min_samples_leaf = 1;
  int max_features = 0;  // candidate features per split; 0 = all
};

// CART regression tree on rows `sample` (repeats allowed) of the row-major
// matrix x (n_features columns). Candidate features per split are drawn
// with rng_state when max_features < n_features.
RegressionTree fit_tree(std::span<const double> x, int n_features,
                        std::span<const double> y,
                        std::span<const std::size_t> sample,
                        const TreeOptions& opts, std::uint64_t seed);

struct SvrParameters {
  double gamma = 0.0;
  double intercept = 0.0;
  std::vector<double> scaler_mean;
  std::vector<double> scaler_std;
  std::vector<std::vector<double>> support_vectors;  // standardized
  std::vector<double> coefficients;

  friend bool operator==(const SvrParameters&, const SvrParameters&) = default;
};

struct QualityModel {
  ModelKind kind = ModelKind::kRfr;
  FeatureLayout layout;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  // rfr: mean of trees. gbr: base_value + learning_rate * sum of trees.
  std::vector<RegressionTree> trees;
  double base_value = 0.0;
  SvrParameters svr;

  // Throws layout-mismatch when x does not have layout.size() entries.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const TrainingSet& data) const;

  friend bool operator==(const QualityModel&, const QualityModel&) = default;
};

// Fits a model. All-equal targets give a constant model (with a warning on
// stderr); non-finite inputs throw.
QualityModel train(const TrainingSet& data, ModelKind kind,
                   const Hyperparams& hp, std::uint64_t seed);

std::string model_to_json(const QualityModel& model);
QualityModel model_from_json(std::string_view text);
void save_model(const QualityModel& model, const std::string& path);
QualityModel load_model(const std::string& path);

// Mean validation PLCC of one configuration over repeated grouped shuffle
// splits of `data`; repeats with undefined PLCC are skipped.
struct CvScore {
  double mean_plcc = 0.0;
  int valid_repeats = 0;
  int excluded_repeats = 0;
};

CvScore grouped_cv_score(const TrainingSet& data, ModelKind kind,
                         const Hyperparams& hp, int n_repeats,
                         double split_fraction, std::uint64_t seed);

struct TuneEntry {
  Hyperparams hyperparams;
  CvScore score;
};

struct TuneReport {
  Hyperparams best;
  std::vector<TuneEntry> table;
};

// Grouped shuffle cross-validation over the grid; the first grid point with
// the highest mean PLCC wins.
TuneReport tune_hyperparams(const TrainingSet& data, ModelKind kind,
                            std::span<const Hyperparams> grid, int n_repeats,
                            double split_fraction, std::uint64_t seed);

struct SffsOptions {
  ModelKind kind = ModelKind::kRfr;
  Hyperparams hyperparams;
  int n_repeats = 5;
  double split_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct SffsStep {
  FeatureId added;
  double score = 0.0;  // mean grouped-CV PLCC with the selection so far
  std::vector<FeatureId> selected;
};

// Sequential forward selection over feature ids; each step adds the id that
// maximizes mean grouped-CV PLCC, ties going to the earlier id in the layout.
std::vector<SffsStep> sffs(const TrainingSet& data, int max_features,
                           const SffsOptions& opts);

}  // namespace omnivq
