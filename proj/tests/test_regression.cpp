// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "omnivq/error.hpp"
#include "omnivq/evaluation.hpp"
#include "omnivq/regression.hpp"

using namespace omnivq;

namespace {

// rows x features table; row i belongs to group i / per_group.
TrainingSet make_set(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                     std::vector<FeatureId> ids, int viewports = 1, int per_group = 1) {
  TrainingSet t;
  t.layout = {std::move(ids), viewports};
  for (std::size_t i = 0; i < x.size(); ++i) {
    TrainingRow r;
    r.video_id = "v" + std::to_string(i);
    r.group_id = "g" + std::to_string(i / per_group);
    r.features = x[i];
    r.dmos = y[i];
    t.rows.push_back(std::move(r));
  }
  return t;
}

// dmos = 3 x0 + 1 with two distractor columns.
TrainingSet linear_set(std::uint64_t seed, int n, double noise = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> e(0, 1);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < n; ++i) {
    x.push_back({u(rng), u(rng), u(rng)});
    y.push_back(3 * x.back()[0] + 1 + noise * e(rng));
  }
  return make_set(x, y, {FeatureId::kGMSD, FeatureId::kSA, FeatureId::kPSNR});
}

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> v;
  for (std::size_t i = a; i < b; ++i) v.push_back(i);
  return v;
}

Hyperparams small_forest() {
  Hyperparams hp;
  hp.n_trees = 30;
  return hp;
}

}  // namespace

TEST(Layout, ColumnNamesRoundTrip) {
  const FeatureLayout l{{FeatureId::kSA, FeatureId::kT_GMSD}, 3};
  const auto cols = l.column_names();
  ASSERT_EQ(cols.size(), 6u);
  EXPECT_EQ(cols[0], "v0_SA");
  EXPECT_EQ(cols[5], "v2_T_GMSD");
  EXPECT_EQ(layout_from_columns(cols), l);
  const std::vector<std::string> bad = {"v0_SA", "v0_XX"};
  EXPECT_THROW(layout_from_columns(bad), Error);
}

TEST(Layout, SelectFeaturesKeepsEveryViewport) {
  const TrainingSet t = make_set({{1, 2, 3, 4}}, {0}, {FeatureId::kSA, FeatureId::kGMSD}, 2);
  const std::vector<FeatureId> keep = {FeatureId::kGMSD};
  const TrainingSet s = select_features(t, keep);
  EXPECT_EQ(s.rows[0].features, (std::vector<double>{2, 4}));
  EXPECT_EQ(s.layout.viewports, 2);
}

TEST(Tree, OverfitTreeReproducesTargets) {
  const TrainingSet t = linear_set(1, 50);
  Hyperparams hp;
  hp.n_trees = 1;
  hp.bootstrap = false;
  hp.max_features = MaxFeatures::kAll;
  const QualityModel m = train(t, ModelKind::kRfr, hp, 0);
  for (const auto& r : t.rows) EXPECT_DOUBLE_EQ(m.predict(r.features), r.dmos);
}

TEST(Tree, StumpForestIsMonotone) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({i / 40.0});
    y.push_back(std::pow(i / 40.0, 2));
  }
  const TrainingSet t = make_set(x, y, {FeatureId::kGMSD});
  Hyperparams hp = small_forest();
  hp.max_depth = 1;
  const QualityModel m = train(t, ModelKind::kRfr, hp, 3);
  double prev = -1e300;
  for (double v = -0.1; v <= 1.1; v += 0.01) {
    const double p = m.predict(std::vector<double>{v});
    EXPECT_GE(p, prev);
    prev = p;
  }
  // Each stump is one threshold, so every tree has one split and two leaves.
  for (const auto& tree : m.trees) EXPECT_EQ(tree.nodes.size(), 3u);
}

TEST(Tree, OrderPreservingTransformKeepsPartition) {
  const TrainingSet t = linear_set(2, 40);
  TrainingSet u = t;
  for (auto& r : u.rows) r.features[0] = std::exp(3 * r.features[0]);
  std::vector<double> xa, xb, y;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    xa.insert(xa.end(), t.rows[i].features.begin(), t.rows[i].features.end());
    xb.insert(xb.end(), u.rows[i].features.begin(), u.rows[i].features.end());
    y.push_back(t.rows[i].dmos);
  }
  const auto sample = range(0, 40);
  const TreeOptions opts{2, 1, 0};
  const RegressionTree a = fit_tree(xa, 3, y, sample, opts, 9);
  const RegressionTree b = fit_tree(xb, 3, y, sample, opts, 9);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_DOUBLE_EQ(a.predict(std::span<const double>(xa).subspan(3 * i, 3)),
                     b.predict(std::span<const double>(xb).subspan(3 * i, 3)));
  }
}

TEST(Rfr, LearnsLinearTarget) {
  const TrainingSet t = linear_set(3, 200);
  const TrainingSet tr = subset(t, range(0, 150));
  const TrainingSet te = subset(t, range(150, 200));
  const QualityModel m = train(tr, ModelKind::kRfr, Hyperparams{}, 11);
  EXPECT_GE(plcc(m.predict(te), te.targets()), 0.95);
}

TEST(Gbr, LearnsLinearTarget) {
  const TrainingSet t = linear_set(4, 200);
  const TrainingSet tr = subset(t, range(0, 150));
  const TrainingSet te = subset(t, range(150, 200));
  Hyperparams hp;
  hp.max_depth = 3;
  hp.max_features = MaxFeatures::kAll;
  hp.bootstrap = false;
  const QualityModel m = train(tr, ModelKind::kGbr, hp, 11);
  EXPECT_GE(plcc(m.predict(te), te.targets()), 0.95);
}

TEST(Svr, LearnsLinearTarget) {
  const TrainingSet t = linear_set(5, 200);
  const TrainingSet tr = subset(t, range(0, 150));
  const TrainingSet te = subset(t, range(150, 200));
  const QualityModel m = train(tr, ModelKind::kSvr, Hyperparams{}, 0);
  EXPECT_GE(plcc(m.predict(te), te.targets()), 0.95);
}

TEST(Models, ConstantTargetGivesConstantModel) {
  const TrainingSet t = make_set({{1, 2}, {3, 4}, {5, 6}}, {7, 7, 7}, {FeatureId::kSA, FeatureId::kGMSD});
  for (ModelKind k : {ModelKind::kRfr, ModelKind::kGbr, ModelKind::kSvr}) {
    const QualityModel m = train(t, k, small_forest(), 0);
    EXPECT_EQ(rmse(m.predict(t), t.targets()), 0.0) << to_string(k);
    EXPECT_EQ(m.predict(std::vector<double>{100, -100}), 7.0);
  }
}

TEST(Models, BatchEqualsSingle) {
  const TrainingSet t = linear_set(6, 60);
  for (ModelKind k : {ModelKind::kRfr, ModelKind::kGbr, ModelKind::kSvr}) {
    const QualityModel m = train(t, k, small_forest(), 1);
    const auto batch = m.predict(t);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      EXPECT_EQ(batch[i], m.predict(t.rows[i].features));
    }
  }
}

TEST(Models, InputValidation) {
  const TrainingSet one_group = make_set({{1}, {2}, {3}}, {1, 2, 3}, {FeatureId::kSA}, 1, 5);
  try {
    train(one_group, ModelKind::kRfr, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooFewGroups);
  }
  TrainingSet bad = linear_set(7, 10);
  bad.rows[3].features[1] = std::nan("");
  try {
    train(bad, ModelKind::kRfr, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFiniteInput);
  }
  const QualityModel m = train(linear_set(8, 20), ModelKind::kRfr, small_forest(), 0);
  try {
    m.predict(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLayoutMismatch);
  }
}

TEST(Models, SameSeedSameModel) {
  const TrainingSet t = linear_set(9, 80);
  EXPECT_EQ(train(t, ModelKind::kRfr, small_forest(), 5), train(t, ModelKind::kRfr, small_forest(), 5));
  EXPECT_NE(train(t, ModelKind::kRfr, small_forest(), 5), train(t, ModelKind::kRfr, small_forest(), 6));
}

TEST(Models, TrainErrorBelowHeldOutError) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TrainingSet t = linear_set(100 + seed, 60, 0.3);
    const TrainingSet tr = subset(t, range(0, 45));
    const TrainingSet te = subset(t, range(45, 60));
    Hyperparams hp;
    hp.n_trees = 20;
    const QualityModel m = train(tr, ModelKind::kRfr, hp, seed);
    if (rmse(m.predict(tr), tr.targets()) <= rmse(m.predict(te), te.targets())) ++ok;
  }
  EXPECT_GE(ok, 95);
}

TEST(ModelJson, RoundTripIsByteIdentical) {
  const TrainingSet t = linear_set(10, 40);
  const auto dir = std::filesystem::temp_directory_path() / "omnivq_model_json";
  std::filesystem::create_directories(dir);
  for (ModelKind k : {ModelKind::kRfr, ModelKind::kGbr, ModelKind::kSvr}) {
    const QualityModel m = train(t, k, small_forest(), 4);
    const std::string text = model_to_json(m);
    const QualityModel back = model_from_json(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(model_to_json(back), text);
    const std::string path = (dir / (std::string(to_string(k)) + ".json")).string();
    save_model(m, path);
    EXPECT_EQ(load_model(path), m);
  }
  EXPECT_THROW(model_from_json("{\"schema_version\": 1}"), Error);
}

TEST(Tuning, SinglePointGrid) {
  const TrainingSet t = linear_set(11, 40);
  Hyperparams hp = small_forest();
  hp.max_depth = 4;
  const std::vector<Hyperparams> grid = {hp};
  const TuneReport r = tune_hyperparams(t, ModelKind::kRfr, grid, 3, 0.2, 0);
  EXPECT_EQ(r.best, hp);
  EXPECT_EQ(r.table.size(), 1u);
}

TEST(Tuning, DeeperTreesWinOnPlantedData) {
  // A sharp non-linear target that shallow trees cannot represent.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 120; ++i) {
    x.push_back({u(rng), u(rng)});
    y.push_back(std::sin(12 * x.back()[0]) + std::cos(9 * x.back()[1]));
  }
  const TrainingSet t = make_set(x, y, {FeatureId::kSA, FeatureId::kGMSD});
  std::vector<Hyperparams> grid;
  for (int depth : {1, 2, 8}) {
    Hyperparams hp = small_forest();
    hp.max_depth = depth;
    hp.max_features = MaxFeatures::kAll;
    grid.push_back(hp);
  }
  const TuneReport r = tune_hyperparams(t, ModelKind::kRfr, grid, 3, 0.2, 1);
  EXPECT_EQ(r.best.max_depth, 8);
  const TuneReport again = tune_hyperparams(t, ModelKind::kRfr, grid, 3, 0.2, 1);
  ASSERT_EQ(again.table.size(), r.table.size());
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    EXPECT_EQ(again.table[i].score.mean_plcc, r.table[i].score.mean_plcc);
  }
}

TEST(Tuning, ConstantPredictionsAreExcluded) {
  // Every row of the validation side has the same features, so a forest
  // predicts a constant there and PLCC is undefined.
  const TrainingSet t =
      make_set({{1}, {1}, {1}, {1}, {1}, {1}}, {1, 2, 3, 4, 5, 6}, {FeatureId::kSA}, 1, 1);
  const CvScore s = grouped_cv_score(t, ModelKind::kRfr, small_forest(), 4, 0.34, 0);
  EXPECT_EQ(s.valid_repeats, 0);
  EXPECT_EQ(s.excluded_repeats, 4);
  EXPECT_TRUE(std::isnan(s.mean_plcc));
}

TEST(Sffs, PicksTheOnlyInformativeFeatureFirst) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 90; ++i) {
    x.push_back({u(rng), u(rng), u(rng), u(rng)});
    y.push_back(20 + 50 * x.back()[2]);
  }
  const TrainingSet t = make_set(
      x, y, {FeatureId::kSA, FeatureId::kPSNR_HVS, FeatureId::kGMSD, FeatureId::kR_TI}, 1, 3);
  SffsOptions opts;
  opts.hyperparams = small_forest();
  const auto steps = sffs(t, 4, opts);
  ASSERT_EQ(steps.size(), 4u);
  EXPECT_EQ(steps[0].added, FeatureId::kGMSD);
  EXPECT_EQ(steps.back().selected.size(), 4u);
}

TEST(Enums, ParseAndPrint) {
  for (ModelKind k : {ModelKind::kRfr, ModelKind::kGbr, ModelKind::kSvr}) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_model_kind("knn"), Error);
  EXPECT_EQ(resolve_max_features(MaxFeatures::kSqrt, 10), 3);
  EXPECT_EQ(resolve_max_features(MaxFeatures::kThird, 2), 1);
  EXPECT_EQ(resolve_max_features(MaxFeatures::kAll, 7), 7);
  EXPECT_FALSE(default_grid(ModelKind::kSvr).empty());
}
