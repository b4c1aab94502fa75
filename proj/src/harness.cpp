// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omnivq/dataset_io.hpp"
#include "omnivq/error.hpp"

namespace omnivq {
namespace {

using Json = nlohmann::ordered_json;

// Sub-seed streams derived from the user seed.
constexpr std::uint64_t kTuneStream = 1;
constexpr std::uint64_t kModelStream = 2;

void announce(HarnessObserver* observer, std::string_view phase) {
  if (observer) observer->on_phase(phase);
}

std::size_t column_index(const FeatureLayout& layout, const std::string& column) {
  const auto names = layout.column_names();
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) {
    fail(ErrorKind::kInvalidArgument, "no feature column named '" + column + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

Json report_json(const EvalReport& r) {
  Json j;
  j["plcc"] = r.plcc;
  j["srocc"] = r.srocc;
  j["rmse"] = r.rmse;
  j["n"] = r.n;
  j["split"] = r.split_descriptor;
  return j;
}

Json hyperparams_json(const Hyperparams& hp, ModelKind kind) {
  Json j;
  if (kind == ModelKind::kSvr) {
    j["c"] = hp.c;
    j["epsilon"] = hp.epsilon;
    j["gamma"] = hp.gamma;
    return j;
  }
  j["n_trees"] = hp.n_trees;
  j["max_depth"] = hp.max_depth;
  j["min_samples_leaf"] = hp.min_samples_leaf;
  j["max_features"] = std::string(to_string(hp.max_features));
  if (kind == ModelKind::kRfr) j["bootstrap"] = hp.bootstrap;
  if (kind == ModelKind::kGbr) j["learning_rate"] = hp.learning_rate;
  return j;
}

Json tune_json(const TuneReport& report, ModelKind kind) {
  Json j;
  j["kind"] = std::string(to_string(kind));
  j["best"] = hyperparams_json(report.best, kind);
  Json table = Json::array();
  for (const auto& e : report.table) {
    Json row;
    row["hyperparams"] = hyperparams_json(e.hyperparams, kind);
    row["mean_plcc"] = e.score.mean_plcc;
    row["valid_repeats"] = e.score.valid_repeats;
    row["excluded_repeats"] = e.score.excluded_repeats;
    table.push_back(row);
  }
  j["table"] = table;
  return j;
}

MethodResult evaluate_model(const QualityModel& model, const TrainingSet& test,
                            std::string descriptor) {
  MethodResult r;
  r.method = std::string(to_string(model.kind));
  r.predictions = model.predict(test);
  r.targets = test.targets();
  for (const auto& row : test.rows) r.video_ids.push_back(row.video_id);
  r.report = evaluate(r.predictions, r.targets, std::move(descriptor));
  return r;
}

void require_targets(const TrainingSet& data, const char* side) {
  for (const auto& row : data.rows) {
    if (!std::isfinite(row.dmos)) {
      fail(ErrorKind::kMissingField,
           std::string(side) + " row '" + row.video_id + "' has no dmos");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Split files

SplitFile parse_split_file(std::string_view text) {
  SplitFile split;
  std::vector<std::string>* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string item = line.substr(b, e - b + 1);
    if (item[0] == '#') continue;
    if (item == "[train]") {
      current = &split.train;
    } else if (item == "[test]") {
      current = &split.test;
    } else if (!current) {
      fail(ErrorKind::kParseError, "split file line " + std::to_string(line_no) +
                                       ": id before any [train]/[test] heading");
    } else {
      current->push_back(item);
    }
  }
  if (split.train.empty() || split.test.empty()) {
    fail(ErrorKind::kParseError, "split file needs non-empty [train] and [test] sections");
  }
  return split;
}

SplitFile read_split_file(const std::string& path) {
  return parse_split_file(read_text_file(path));
}

std::string split_file_to_text(const SplitFile& split) {
  std::string out = "[train]\n";
  for (const auto& id : split.train) out += id + "\n";
  out += "\n[test]\n";
  for (const auto& id : split.test) out += id + "\n";
  return out;
}

// ---------------------------------------------------------------------------

FittedLearner fit_learner(const TrainingSet& train_set, const LearnerConfig& cfg,
                          HarnessObserver* observer) {
  require_targets(train_set, "training");
  const std::vector<Hyperparams> grid = cfg.grid.empty() ? default_grid(cfg.kind) : cfg.grid;
  FittedLearner out;
  Hyperparams chosen = grid.front();
  if (grid.size() > 1) {
    announce(observer, "tune");
    out.tuning = tune_hyperparams(train_set, cfg.kind, grid, cfg.tune_repeats, cfg.tune_fraction,
                                  derive_seed(cfg.seed, kTuneStream));
    chosen = out.tuning->best;
  }
  announce(observer, "train");
  out.model = train(train_set, cfg.kind, chosen, derive_seed(cfg.seed, kModelStream));
  return out;
}

MethodResult evaluate_baseline(const TrainingSet& train, const TrainingSet& test,
                               const std::string& column) {
  const std::size_t c = column_index(train.layout, column);
  if (!(test.layout == train.layout)) {
    fail(ErrorKind::kLayoutMismatch, "baseline: train and test layouts differ");
  }
  std::vector<double> train_scores, test_scores;
  for (const auto& row : train.rows) train_scores.push_back(row.features[c]);
  for (const auto& row : test.rows) test_scores.push_back(row.features[c]);
  MethodResult r;
  r.method = column;
  r.logistic = fit_logistic4(train_scores, train.targets());
  r.predictions = apply_logistic4(*r.logistic, test_scores);
  r.targets = test.targets();
  for (const auto& row : test.rows) r.video_ids.push_back(row.video_id);
  r.report = evaluate(r.predictions, r.targets, "baseline " + column);
  return r;
}

SplitResult run_fixed_split(const RowSource& data, const SplitFile& split,
                            const LearnerConfig& cfg,
                            std::span<const std::string> baseline_columns,
                            HarnessObserver* observer) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i) index.emplace(data.video_id(i), i);

  auto resolve = [&](const std::vector<std::string>& ids, const char* side) {
    std::vector<std::size_t> rows;
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        fail(ErrorKind::kDuplicateId, std::string(side) + " split lists '" + id + "' twice");
      }
      const auto it = index.find(id);
      if (it == index.end()) {
        fail(ErrorKind::kInvalidArgument,
             std::string(side) + " split lists unknown video id '" + id + "'");
      }
      rows.push_back(it->second);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  {
    const std::set<std::string> train_ids(split.train.begin(), split.train.end());
    for (const auto& id : split.test) {
      if (train_ids.count(id)) {
        fail(ErrorKind::kOverlapBetweenSplits, "video '" + id + "' is in both train and test");
      }
    }
  }
  const auto train_rows = resolve(split.train, "train");
  const auto test_rows = resolve(split.test, "test");

  SplitResult result;
  std::set<std::string> train_groups;
  for (std::size_t i : train_rows) train_groups.insert(data.group_id(i));
  std::set<std::string> shared;
  for (std::size_t i : test_rows) {
    if (train_groups.count(data.group_id(i))) shared.insert(data.group_id(i));
  }
  for (const auto& g : shared) {
    result.warnings.push_back("group '" + g + "' appears in both train and test");
  }
  const std::size_t unused = data.size() - train_rows.size() - test_rows.size();
  if (unused > 0) {
    result.warnings.push_back(std::to_string(unused) + " rows are in neither split");
  }

  announce(observer, "fit");
  const TrainingSet train = materialize(data, train_rows);
  FittedLearner fitted = fit_learner(train, cfg, observer);
  result.tuning = std::move(fitted.tuning);
  result.model = std::move(fitted.model);

  announce(observer, "test");
  const TrainingSet test = materialize(data, test_rows);
  require_targets(test, "test");
  result.methods.push_back(evaluate_model(result.model, test, "fixed split test"));
  if (!baseline_columns.empty()) {
    announce(observer, "baseline");
    for (const auto& column : baseline_columns) {
      result.methods.push_back(evaluate_baseline(train, test, column));
    }
  }
  return result;
}

CvResult run_repeated_cv(const RowSource& data, const LearnerConfig& cfg, int n_repeats,
                         double test_fraction, std::uint64_t seed,
                         HarnessObserver* observer) {
  if (n_repeats < 1) fail(ErrorKind::kInvalidArgument, "need at least one repeat");
  std::vector<std::string> groups;
  groups.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) groups.push_back(data.group_id(i));
  const std::size_t distinct = std::set<std::string>(groups.begin(), groups.end()).size();
  if (distinct < 5) {
    fail(ErrorKind::kTooFewGroups, "repeated cross-validation needs at least 5 groups, got " +
                                       std::to_string(distinct));
  }

  CvResult result;
  for (int r = 0; r < n_repeats; ++r) {
    const std::uint64_t repeat_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const GroupSplit split = grouped_shuffle_split(groups, test_fraction, repeat_seed);
    announce(observer, "fit");
    const TrainingSet train = materialize(data, split.train);
    LearnerConfig repeat_cfg = cfg;
    repeat_cfg.seed = repeat_seed;
    const FittedLearner fitted = fit_learner(train, repeat_cfg, observer);

    announce(observer, "test");
    const TrainingSet test = materialize(data, split.test);
    require_targets(test, "test");
    const auto pred = fitted.model.predict(test);
    const auto truth = test.targets();
    try {
      const EvalReport rep = evaluate(pred, truth);
      result.repeat.push_back(r);
      result.plcc.push_back(rep.plcc);
      result.srocc.push_back(rep.srocc);
      result.rmse.push_back(rep.rmse);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kZeroVariance && e.kind() != ErrorKind::kInvalidArgument) throw;
      result.excluded.push_back(r);
    }
  }
  result.valid_repeats = static_cast<int>(result.repeat.size());
  result.excluded_repeats = static_cast<int>(result.excluded.size());
  auto avg = [](const std::vector<double>& v) {
    return v.empty() ? std::nan("")
                     : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  result.mean.plcc = avg(result.plcc);
  result.mean.srocc = avg(result.srocc);
  result.mean.rmse = avg(result.rmse);
  result.mean.n = data.size();
  std::ostringstream desc;
  desc << "grouped cv repeats=" << n_repeats << " test_fraction=" << test_fraction
       << " seed=" << seed;
  result.mean.split_descriptor = desc.str();
  return result;
}

SplitResult run_cross_dataset(const RowSource& train_source, const RowSource& test_source,
                              const LearnerConfig& cfg,
                              std::span<const std::string> baseline_columns,
                              HarnessObserver* observer) {
  if (!(train_source.layout() == test_source.layout())) {
    fail(ErrorKind::kLayoutMismatch, "train and test datasets have different feature layouts");
  }
  std::vector<std::size_t> train_rows(train_source.size());
  std::iota(train_rows.begin(), train_rows.end(), 0);
  std::vector<std::size_t> test_rows(test_source.size());
  std::iota(test_rows.begin(), test_rows.end(), 0);

  SplitResult result;
  announce(observer, "fit");
  const TrainingSet train = materialize(train_source, train_rows);
  FittedLearner fitted = fit_learner(train, cfg, observer);
  result.tuning = std::move(fitted.tuning);
  result.model = std::move(fitted.model);

  announce(observer, "test");
  const TrainingSet test = materialize(test_source, test_rows);
  require_targets(test, "test");
  result.methods.push_back(evaluate_model(result.model, test, "cross-dataset test"));
  if (!baseline_columns.empty()) {
    announce(observer, "baseline");
    for (const auto& column : baseline_columns) {
      result.methods.push_back(evaluate_baseline(train, test, column));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exports

std::string to_json(const EvalReport& report) { return report_json(report).dump(2) + "\n"; }

std::string split_result_to_json(const SplitResult& result) {
  Json j;
  Json methods = Json::array();
  for (const auto& m : result.methods) {
    Json e;
    e["method"] = m.method;
    e["report"] = report_json(m.report);
    if (m.logistic) {
      e["logistic"] = {m.logistic->beta1, m.logistic->beta2, m.logistic->beta3,
                       m.logistic->beta4};
    }
    methods.push_back(e);
  }
  j["methods"] = methods;
  j["model"] = {{"kind", std::string(to_string(result.model.kind))},
                {"hyperparams", hyperparams_json(result.model.hyperparams, result.model.kind)},
                {"seed", result.model.seed}};
  if (result.tuning) j["tuning"] = tune_json(*result.tuning, result.model.kind);
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string predictions_to_csv(const MethodResult& result) {
  std::string out = "video_id,dmos,prediction\n";
  for (std::size_t i = 0; i < result.predictions.size(); ++i) {
    out += result.video_ids[i] + "," + format_double(result.targets[i]) + "," +
           format_double(result.predictions[i]) + "\n";
  }
  return out;
}

std::string cv_result_to_json(const CvResult& result) {
  Json j;
  j["mean"] = report_json(result.mean);
  j["valid_repeats"] = result.valid_repeats;
  j["excluded_repeats"] = result.excluded_repeats;
  j["excluded"] = result.excluded;
  return j.dump(2) + "\n";
}

std::string cv_repeats_to_csv(const CvResult& result) {
  std::string out = "repeat,plcc,srocc,rmse\n";
  for (std::size_t i = 0; i < result.repeat.size(); ++i) {
    out += std::to_string(result.repeat[i]) + "," + format_double(result.plcc[i]) + "," +
           format_double(result.srocc[i]) + "," + format_double(result.rmse[i]) + "\n";
  }
  return out;
}

std::string tune_report_to_json(const TuneReport& report, ModelKind kind) {
  return tune_json(report, kind).dump(2) + "\n";
}

std::string sffs_to_json(const std::vector<SffsStep>& steps) {
  Json j = Json::array();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Json s;
    s["step"] = i + 1;
    s["added"] = std::string(feature_name(steps[i].added));
    s["mean_plcc"] = steps[i].score;
    Json selected = Json::array();
    for (FeatureId id : steps[i].selected) selected.push_back(std::string(feature_name(id)));
    s["selected"] = selected;
    j.push_back(s);
  }
  return j.dump(2) + "\n";
}

std::string sffs_to_csv(const std::vector<SffsStep>& steps) {
  std::string out = "step,added,mean_plcc,selected\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string selected;
    for (FeatureId id : steps[i].selected) {
      if (!selected.empty()) selected += "+";
      selected += feature_name(id);
    }
    out += std::to_string(i + 1) + "," + std::string(feature_name(steps[i].added)) + "," +
           format_double(steps[i].score) + "," + selected + "\n";
  }
  return out;
}

}  // namespace omnivq
