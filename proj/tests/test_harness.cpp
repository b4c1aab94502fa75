// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "omnivq/error.hpp"
#include "omnivq/harness.hpp"

using namespace omnivq;

namespace {

// Row source that records which rows each harness phase reads.
class CountingSource : public RowSource, public HarnessObserver {
 public:
  explicit CountingSource(const TrainingSet& data) : data_(data) {}
  const FeatureLayout& layout() const override { return data_.layout; }
  std::size_t size() const override { return data_.rows.size(); }
  const TrainingRow& row(std::size_t i) const override {
    reads_[phase_].insert(i);
    ++total_reads_;
    return data_.rows.at(i);
  }
  const std::string& video_id(std::size_t i) const override { return data_.rows.at(i).video_id; }
  const std::string& group_id(std::size_t i) const override { return data_.rows.at(i).group_id; }
  void on_phase(std::string_view phase) override {
    phase_ = std::string(phase);
    phases_.push_back(phase_);
    if (phase_ == "fit") ++fits_;
    on_phase_hook();
  }
  virtual void on_phase_hook() {}

  mutable std::map<std::string, std::set<std::size_t>> reads_;
  mutable std::size_t total_reads_ = 0;
  std::string phase_ = "none";
  std::vector<std::string> phases_;
  int fits_ = 0;

 private:
  const TrainingSet& data_;
};

// groups x levels rows, dmos = 30 * feature0 + noise.
TrainingSet planted(int groups, int levels, std::uint64_t seed, double noise = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> n(0, 1);
  TrainingSet t;
  t.layout = {{FeatureId::kGMSD, FeatureId::kSA}, 1};
  for (int g = 0; g < groups; ++g) {
    for (int l = 0; l < levels; ++l) {
      TrainingRow r;
      r.group_id = "c" + std::to_string(g);
      r.video_id = r.group_id + "_d" + std::to_string(l);
      r.features = {u(rng), u(rng)};
      r.dmos = 30 * r.features[0] + noise * n(rng);
      t.rows.push_back(r);
    }
  }
  return t;
}

LearnerConfig small_rfr(bool tune) {
  LearnerConfig c;
  Hyperparams a;
  a.n_trees = 15;
  Hyperparams b = a;
  b.max_depth = 3;
  c.grid = tune ? std::vector<Hyperparams>{a, b} : std::vector<Hyperparams>{a};
  c.tune_repeats = 3;
  c.seed = 5;
  return c;
}

SplitFile first_groups_as_test(const TrainingSet& t, int test_groups, int levels) {
  SplitFile s;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    (static_cast<int>(i) < test_groups * levels ? s.test : s.train).push_back(t.rows[i].video_id);
  }
  return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST(SplitFile, ParseAndPrint) {
  const SplitFile s = parse_split_file("# comment\n[train]\na\nb\n\n[test]\nc\n");
  EXPECT_EQ(s.train, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(s.test, (std::vector<std::string>{"c"}));
  EXPECT_EQ(parse_split_file(split_file_to_text(s)).train, s.train);
  EXPECT_THROW(parse_split_file("a\n"), Error);
}

TEST(FixedSplit, TuningReadsOnlyTrainRows) {
  const TrainingSet t = planted(10, 3, 1);
  const SplitFile split = first_groups_as_test(t, 2, 3);
  CountingSource src(t);
  const SplitResult r = run_fixed_split(src, split, small_rfr(true), {}, &src);
  ASSERT_TRUE(r.tuning);
  const std::vector<std::string> expected = {"fit", "tune", "train", "test"};
  EXPECT_EQ(src.phases_, expected);
  // Rows 0..5 are the test groups.
  EXPECT_EQ(src.reads_["fit"].size(), 24u);
  EXPECT_EQ(*src.reads_["fit"].begin(), 6u);
  EXPECT_TRUE(src.reads_["tune"].empty());
  EXPECT_TRUE(src.reads_["train"].empty());
  EXPECT_EQ(src.reads_["test"], (std::set<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(src.reads_.count("none"), 0u);
  EXPECT_EQ(src.total_reads_, 30u);
}

TEST(FixedSplit, ReportAndWarnings) {
  const TrainingSet t = planted(12, 3, 2, 0.5);
  SplitFile split = first_groups_as_test(t, 3, 3);
  const TrainingSetSource src(t);
  const std::vector<std::string> baselines = {"v0_GMSD"};
  const SplitResult r = run_fixed_split(src, split, small_rfr(false), baselines);
  ASSERT_EQ(r.methods.size(), 2u);
  EXPECT_EQ(r.methods[0].report.n, 9u);
  EXPECT_GT(r.methods[0].report.plcc, 0.8);
  EXPECT_TRUE(r.methods[1].logistic);
  EXPECT_TRUE(r.warnings.empty());
  // Swapping the sides changes the report.
  SplitFile swapped{split.test, split.train};
  const SplitResult s = run_fixed_split(src, swapped, small_rfr(false));
  EXPECT_NE(s.methods[0].report.plcc, r.methods[0].report.plcc);
  // Shared group and unused rows are warnings.
  split.test.push_back(split.train.back());
  split.train.pop_back();
  split.train.pop_back();
  const SplitResult w = run_fixed_split(src, split, small_rfr(false));
  EXPECT_EQ(w.warnings.size(), 2u);
}

TEST(FixedSplit, Errors) {
  const TrainingSet t = planted(6, 2, 3);
  const TrainingSetSource src(t);
  SplitFile overlap = first_groups_as_test(t, 1, 2);
  overlap.test.push_back(overlap.train.front());
  EXPECT_EQ(kind_of([&] { run_fixed_split(src, overlap, small_rfr(false)); }),
            ErrorKind::kOverlapBetweenSplits);
  SplitFile unknown = first_groups_as_test(t, 1, 2);
  unknown.test.push_back("nope");
  EXPECT_EQ(kind_of([&] { run_fixed_split(src, unknown, small_rfr(false)); }),
            ErrorKind::kInvalidArgument);
  SplitFile dup = first_groups_as_test(t, 1, 2);
  dup.train.push_back(dup.train.front());
  EXPECT_EQ(kind_of([&] { run_fixed_split(src, dup, small_rfr(false)); }),
            ErrorKind::kDuplicateId);
}

TEST(RepeatedCv, EveryRepeatTunesOnItsTrainRowsOnly) {
  const TrainingSet t = planted(8, 3, 4);
  std::vector<std::string> groups;
  for (const auto& r : t.rows) groups.push_back(r.group_id);

  struct PerRepeat : CountingSource {
    using CountingSource::CountingSource;
    std::vector<std::map<std::string, std::set<std::size_t>>> by_repeat;
    void on_phase_hook() override {
      if (phase_ == "fit") {
        if (fits_ > 1) by_repeat.push_back(reads_);
        reads_.clear();
      }
    }
  } src(t);
  const int repeats = 6;
  const std::uint64_t seed = 17;
  const CvResult cv = run_repeated_cv(src, small_rfr(true), repeats, 0.25, seed, &src);
  src.by_repeat.push_back(src.reads_);
  ASSERT_EQ(src.by_repeat.size(), static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const GroupSplit split = grouped_shuffle_split(groups, 0.25, derive_seed(seed, r));
    auto& reads = src.by_repeat[r];
    EXPECT_EQ(reads["fit"], std::set<std::size_t>(split.train.begin(), split.train.end()));
    EXPECT_TRUE(reads["tune"].empty());
    EXPECT_TRUE(reads["train"].empty());
    EXPECT_EQ(reads["test"], std::set<std::size_t>(split.test.begin(), split.test.end()));
  }
  EXPECT_EQ(cv.valid_repeats + cv.excluded_repeats, repeats);
}

TEST(RepeatedCv, LinearDatasetScoresHigh) {
  const TrainingSet t = planted(15, 3, 5, 0.3);
  const TrainingSetSource src(t);
  LearnerConfig cfg;
  cfg.kind = ModelKind::kSvr;
  cfg.grid = {Hyperparams{}};
  const CvResult cv = run_repeated_cv(src, cfg, 20, 0.2, 1);
  EXPECT_EQ(cv.valid_repeats, 20);
  EXPECT_GE(cv.mean.plcc, 0.95);
}

TEST(RepeatedCv, RepeatsDoNotDependOnEachOther) {
  const TrainingSet t = planted(8, 2, 6);
  const TrainingSetSource src(t);
  const CvResult a = run_repeated_cv(src, small_rfr(false), 3, 0.25, 9);
  const CvResult b = run_repeated_cv(src, small_rfr(false), 6, 0.25, 9);
  for (int r = 0; r < 3; ++r) EXPECT_EQ(a.plcc[r], b.plcc[r]);
}

TEST(RepeatedCv, ConstantPredictionsAreExcluded) {
  TrainingSet t = planted(6, 2, 7);
  for (auto& r : t.rows) r.features = {0.5, 0.5};
  const TrainingSetSource src(t);
  const CvResult cv = run_repeated_cv(src, small_rfr(false), 4, 0.2, 0);
  EXPECT_EQ(cv.valid_repeats, 0);
  EXPECT_EQ(cv.excluded_repeats, 4);
  EXPECT_TRUE(std::isnan(cv.mean.plcc));
  EXPECT_NE(cv_result_to_json(cv).find("\"excluded_repeats\": 4"), std::string::npos);
}

TEST(RepeatedCv, NeedsFiveGroups) {
  const TrainingSet t = planted(4, 3, 8);
  const TrainingSetSource src(t);
  EXPECT_EQ(kind_of([&] { run_repeated_cv(src, small_rfr(false), 2, 0.2, 0); }),
            ErrorKind::kTooFewGroups);
}

TEST(CrossDataset, TrainEqualsTestAndDisjointDomains) {
  const TrainingSet a = planted(8, 3, 9);
  const TrainingSetSource src(a);
  const SplitResult same = run_cross_dataset(src, src, small_rfr(false));
  EXPECT_GT(same.methods[0].report.plcc, 0.95);
  TrainingSet b = planted(6, 3, 10);
  for (auto& r : b.rows) r.features[0] += 5.0;
  const SplitResult other = run_cross_dataset(src, TrainingSetSource(b), small_rfr(false));
  EXPECT_EQ(other.methods[0].report.n, 18u);
  EXPECT_TRUE(std::isfinite(other.methods[0].report.rmse));
  TrainingSet c = b;
  c.layout.viewports = 2;
  EXPECT_EQ(kind_of([&] { run_cross_dataset(src, TrainingSetSource(c), small_rfr(false)); }),
            ErrorKind::kLayoutMismatch);
}

TEST(Exports, ContainCriteria) {
  const TrainingSet t = planted(10, 3, 11);
  const TrainingSetSource src(t);
  const SplitResult r = run_fixed_split(src, first_groups_as_test(t, 2, 3), small_rfr(true));
  const std::string json = split_result_to_json(r);
  for (const char* key : {"\"plcc\"", "\"srocc\"", "\"rmse\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
  const std::string csv = predictions_to_csv(r.methods[0]);
  EXPECT_EQ(csv.rfind("video_id,", 0), 0u);
  EXPECT_NE(tune_report_to_json(*r.tuning, ModelKind::kRfr).find("max_depth"), std::string::npos);
}
