// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "omnivq/error.hpp"
#include "omnivq/evaluation.hpp"
#include "omnivq/harness.hpp"
#include "omnivq/synthetic.hpp"

namespace omnivq {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Run configuration JSON

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::kParseError, "config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(ErrorKind::kParseError, "config: unknown key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void read_if(const Json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::kParseError, "config: '" + where + "." + key + "' has the wrong type");
  }
}

Json hyperparams_to_config(const Hyperparams& hp) {
  Json j;
  j["n_trees"] = hp.n_trees;
  j["max_depth"] = hp.max_depth;
  j["min_samples_leaf"] = hp.min_samples_leaf;
  j["max_features"] = std::string(to_string(hp.max_features));
  j["bootstrap"] = hp.bootstrap;
  j["learning_rate"] = hp.learning_rate;
  j["c"] = hp.c;
  j["epsilon"] = hp.epsilon;
  j["gamma"] = hp.gamma;
  return j;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& cell : split_csv_line(s)) {
    const auto b = cell.find_first_not_of(' ');
    const auto e = cell.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

RunConfig run_config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParseError, std::string("config: ") + e.what());
  }
  RunConfig cfg;
  check_keys(j, {"features", "pooling", "model", "cv", "jobs"}, "");
  if (j.contains("features")) {
    const Json& f = j.at("features");
    check_keys(f, {"mode", "pattern", "fov_deg", "vp_width", "vp_height", "list",
                   "gmsd_downsample", "sphere_samples"},
               "features");
    std::string s;
    if (f.contains("mode")) {
      read_if(f, "mode", s, "features");
      cfg.features.mode = parse_feature_mode(s);
    }
    if (f.contains("pattern")) {
      read_if(f, "pattern", s, "features");
      cfg.features.pattern = parse_pattern_kind(s);
    }
    read_if(f, "fov_deg", cfg.features.fov_deg, "features");
    read_if(f, "vp_width", cfg.features.vp_width, "features");
    read_if(f, "vp_height", cfg.features.vp_height, "features");
    if (f.contains("list")) {
      std::vector<std::string> names;
      read_if(f, "list", names, "features");
      cfg.features.features.clear();
      for (const auto& n : names) cfg.features.features.push_back(parse_feature(n));
    }
    read_if(f, "gmsd_downsample", cfg.features.gmsd_downsample, "features");
    read_if(f, "sphere_samples", cfg.features.sphere_samples, "features");
  }
  if (j.contains("pooling")) {
    const Json& p = j.at("pooling");
    check_keys(p, {"kind", "alpha", "beta", "tau", "p", "k_percent", "literal_normalization"},
               "pooling");
    if (p.contains("kind")) {
      std::string s;
      read_if(p, "kind", s, "pooling");
      cfg.pooling.kind = parse_pooling_kind(s);
    }
    read_if(p, "alpha", cfg.pooling.alpha, "pooling");
    read_if(p, "beta", cfg.pooling.beta, "pooling");
    if (p.contains("tau") && !p.at("tau").is_null()) {
      double tau = 0.0;
      read_if(p, "tau", tau, "pooling");
      cfg.pooling.tau = tau;
    }
    read_if(p, "p", cfg.pooling.p, "pooling");
    read_if(p, "k_percent", cfg.pooling.k_percent, "pooling");
    read_if(p, "literal_normalization", cfg.pooling.literal_normalization, "pooling");
  }
  if (j.contains("model")) {
    const Json& m = j.at("model");
    check_keys(m, {"kind", "seed", "tune", "tune_repeats", "tune_fraction", "hyperparams"},
               "model");
    if (m.contains("kind")) {
      std::string s;
      read_if(m, "kind", s, "model");
      cfg.kind = parse_model_kind(s);
    }
    read_if(m, "seed", cfg.seed, "model");
    read_if(m, "tune", cfg.tune, "model");
    read_if(m, "tune_repeats", cfg.tune_repeats, "model");
    read_if(m, "tune_fraction", cfg.tune_fraction, "model");
    if (m.contains("hyperparams")) {
      const Json& h = m.at("hyperparams");
      check_keys(h, {"n_trees", "max_depth", "min_samples_leaf", "max_features", "bootstrap",
                     "learning_rate", "c", "epsilon", "gamma"},
                 "model.hyperparams");
      Hyperparams& hp = cfg.hyperparams;
      read_if(h, "n_trees", hp.n_trees, "model.hyperparams");
      read_if(h, "max_depth", hp.max_depth, "model.hyperparams");
      read_if(h, "min_samples_leaf", hp.min_samples_leaf, "model.hyperparams");
      if (h.contains("max_features")) {
        std::string s;
        read_if(h, "max_features", s, "model.hyperparams");
        hp.max_features = parse_max_features(s);
      }
      read_if(h, "bootstrap", hp.bootstrap, "model.hyperparams");
      read_if(h, "learning_rate", hp.learning_rate, "model.hyperparams");
      read_if(h, "c", hp.c, "model.hyperparams");
      read_if(h, "epsilon", hp.epsilon, "model.hyperparams");
      read_if(h, "gamma", hp.gamma, "model.hyperparams");
    }
  }
  if (j.contains("cv")) {
    const Json& c = j.at("cv");
    check_keys(c, {"repeats", "fraction"}, "cv");
    read_if(c, "repeats", cfg.cv_repeats, "cv");
    read_if(c, "fraction", cfg.cv_fraction, "cv");
  }
  read_if(j, "jobs", cfg.jobs, "");
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  Json j;
  Json f;
  f["mode"] = std::string(to_string(cfg.features.mode));
  f["pattern"] = std::string(to_string(cfg.features.pattern));
  f["fov_deg"] = cfg.features.fov_deg;
  f["vp_width"] = cfg.features.vp_width;
  f["vp_height"] = cfg.features.vp_height;
  Json list = Json::array();
  for (FeatureId id : cfg.features.features) list.push_back(std::string(feature_name(id)));
  f["list"] = list;
  f["gmsd_downsample"] = cfg.features.gmsd_downsample;
  f["sphere_samples"] = cfg.features.sphere_samples;
  j["features"] = f;
  Json p;
  p["kind"] = std::string(to_string(cfg.pooling.kind));
  p["alpha"] = cfg.pooling.alpha;
  p["beta"] = cfg.pooling.beta;
  if (cfg.pooling.tau) {
    p["tau"] = *cfg.pooling.tau;
  } else {
    p["tau"] = nullptr;
  }
  p["p"] = cfg.pooling.p;
  p["k_percent"] = cfg.pooling.k_percent;
  p["literal_normalization"] = cfg.pooling.literal_normalization;
  j["pooling"] = p;
  Json m;
  m["kind"] = std::string(to_string(cfg.kind));
  m["seed"] = cfg.seed;
  m["tune"] = cfg.tune;
  m["tune_repeats"] = cfg.tune_repeats;
  m["tune_fraction"] = cfg.tune_fraction;
  m["hyperparams"] = hyperparams_to_config(cfg.hyperparams);
  j["model"] = m;
  j["cv"] = {{"repeats", cfg.cv_repeats}, {"fraction", cfg.cv_fraction}};
  j["jobs"] = cfg.jobs;
  return j.dump(2) + "\n";
}

namespace {

// ---------------------------------------------------------------------------
// Flag groups shared by several commands

struct FeatureFlags {
  std::optional<std::string> mode, pattern, list;
  std::optional<double> fov;
  std::optional<int> vp_width, vp_height;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Feature domain")
        ->check(CLI::IsMember({"projection", "collage", "vp"}));
    app->add_option("--pattern", pattern, "Viewport sampling pattern")
        ->check(CLI::IsMember({"uniform", "tropical", "equatorial"}));
    app->add_option("--fov", fov, "Viewport field of view in degrees");
    app->add_option("--vp-width", vp_width, "Viewport width in pixels (0 = match ERP density)");
    app->add_option("--vp-height", vp_height, "Viewport height in pixels (0 = width)");
    app->add_option("--features", list, "Comma-separated feature names");
  }
  bool any() const { return mode || pattern || list || fov || vp_width || vp_height; }
  void apply(FeatureConfig& f) const {
    if (mode) f.mode = parse_feature_mode(*mode);
    if (pattern) f.pattern = parse_pattern_kind(*pattern);
    if (fov) f.fov_deg = *fov;
    if (vp_width) f.vp_width = *vp_width;
    if (vp_height) f.vp_height = *vp_height;
    if (list) f.features = parse_feature_list(*list);
  }
};

struct PoolFlags {
  std::optional<std::string> kind;
  std::optional<double> alpha, beta, tau, p, k_percent;
  bool literal = false;

  void add(CLI::App* app) {
    app->add_option("--pooling", kind, "Temporal pooling")
        ->check(CLI::IsMember({"hvs", "mean", "minkowski", "percentile"}));
    app->add_option("--alpha", alpha, "HVS low-pass gain for falling scores");
    app->add_option("--beta", beta, "HVS low-pass gain for rising scores");
    app->add_option("--tau", tau, "HVS recency time constant in frames (default F/3)");
    app->add_option("--p", p, "Minkowski order");
    app->add_option("--k-percent", k_percent, "Share of worst frames for percentile pooling");
    app->add_flag("--literal-normalization", literal,
                  "Divide the HVS recency sum by F instead of the weight sum");
  }
  void apply(PoolingConfig& c) const {
    if (kind) c.kind = parse_pooling_kind(*kind);
    if (alpha) c.alpha = *alpha;
    if (beta) c.beta = *beta;
    if (tau) c.tau = *tau;
    if (p) c.p = *p;
    if (k_percent) c.k_percent = *k_percent;
    if (literal) c.literal_normalization = true;
  }
};

struct ModelFlags {
  std::optional<std::string> kind, grid, max_features;
  std::optional<std::uint64_t> seed;
  std::optional<int> tune_repeats, n_trees, max_depth, min_samples_leaf;
  std::optional<double> tune_fraction, learning_rate, c, epsilon, gamma;

  void add(CLI::App* app, bool with_grid) {
    app->add_option("--kind", kind, "Regressor")->check(CLI::IsMember({"rfr", "gbr", "svr"}));
    app->add_option("--seed", seed, "Random seed");
    if (with_grid) {
      app->add_option("--grid", grid, "Hyperparameter search: default grid or fixed values")
          ->check(CLI::IsMember({"default", "fixed"}));
      app->add_option("--tune-repeats", tune_repeats, "Grouped shuffle repeats per grid point");
      app->add_option("--tune-fraction", tune_fraction, "Validation share of groups when tuning");
    }
    app->add_option("--n-trees", n_trees, "Trees (rfr, gbr)");
    app->add_option("--max-depth", max_depth, "Tree depth limit, 0 = unlimited (rfr, gbr)");
    app->add_option("--min-samples-leaf", min_samples_leaf, "Minimum rows per leaf (rfr, gbr)");
    app->add_option("--max-features", max_features, "Candidate features per split (rfr, gbr)")
        ->check(CLI::IsMember({"all", "sqrt", "third"}));
    app->add_option("--learning-rate", learning_rate, "Shrinkage (gbr)");
    app->add_option("--c", c, "Box constraint (svr)");
    app->add_option("--epsilon", epsilon, "Insensitive-zone half width (svr)");
    app->add_option("--gamma", gamma, "RBF width, 0 = 1/features (svr)");
  }
  void apply(RunConfig& cfg) const {
    if (kind) cfg.kind = parse_model_kind(*kind);
    if (seed) cfg.seed = *seed;
    if (grid) cfg.tune = *grid == "default";
    if (tune_repeats) cfg.tune_repeats = *tune_repeats;
    if (tune_fraction) cfg.tune_fraction = *tune_fraction;
    Hyperparams& hp = cfg.hyperparams;
    if (n_trees) hp.n_trees = *n_trees;
    if (max_depth) hp.max_depth = *max_depth;
    if (min_samples_leaf) hp.min_samples_leaf = *min_samples_leaf;
    if (max_features) hp.max_features = parse_max_features(*max_features);
    if (learning_rate) hp.learning_rate = *learning_rate;
    if (c) hp.c = *c;
    if (epsilon) hp.epsilon = *epsilon;
    if (gamma) hp.gamma = *gamma;
  }
};

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<int> jobs;
};

RunConfig load_config(const Common& common) {
  if (common.config_path.empty()) return RunConfig{};
  return run_config_from_json(read_text_file(common.config_path));
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::kIoError, "cannot create output directory " + dir);
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void echo_config(const std::string& dir, const std::string& command, const Json& inputs,
                 const RunConfig& cfg) {
  Json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["config"] = Json::parse(run_config_to_json(cfg));
  write_text_file(out_path(dir, "resolved_config.json"), j.dump(2) + "\n");
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The error of the
// lowest failing index is rethrown, so failures do not depend on timing.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

LearnerConfig learner_config(const RunConfig& cfg, bool tune) {
  LearnerConfig l;
  l.kind = cfg.kind;
  if (tune) {
    l.grid = default_grid(cfg.kind);
  } else {
    l.grid = {cfg.hyperparams};
  }
  l.tune_repeats = cfg.tune_repeats;
  l.tune_fraction = cfg.tune_fraction;
  l.seed = cfg.seed;
  return l;
}

TrainingSet restrict_to_ids(const TrainingSet& table, const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.rows.size(); ++i) index[table.rows[i].video_id] = i;
  std::vector<std::size_t> rows;
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      fail(ErrorKind::kInvalidArgument, "split lists unknown video id '" + id + "'");
    }
    rows.push_back(it->second);
  }
  std::sort(rows.begin(), rows.end());
  return subset(table, rows);
}

void check_split_overlap(const SplitFile& split) {
  const std::set<std::string> train(split.train.begin(), split.train.end());
  for (const auto& id : split.test) {
    if (train.count(id)) {
      fail(ErrorKind::kOverlapBetweenSplits, "video '" + id + "' is in both train and test");
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_features(const RunConfig& cfg, const std::string& manifest_path, const Common& common,
                  std::ostream& out, std::ostream& err) {
  validate(cfg.features);
  const DatasetManifest manifest = load_manifest(manifest_path, ManifestMode::kInference);
  for (const auto& w : manifest.warnings) err << "warning: " << w << "\n";
  prepare_out(common.out_dir);
  std::atomic<int> reused{0};
  parallel_for(manifest.videos.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
    const VideoEntry& entry = manifest.videos[i];
    const Provenance expected = make_provenance(cfg.features, entry.width);
    if (fs::exists(cache_sidecar_path(common.out_dir, entry.video_id)) &&
        fs::exists(cache_csv_path(common.out_dir, entry.video_id))) {
      try {
        const FeatureTensor cached = read_feature_cache(common.out_dir, entry.video_id, &expected);
        if (cached.group_id == entry.group_id && cached.dmos == entry.dmos &&
            cached.frames == entry.frame_count) {
          ++reused;
          return;
        }
      } catch (const Error&) {
        // Stale or unreadable cache: recompute below.
      }
    }
    write_feature_cache(compute_features(entry, cfg.features), common.out_dir);
  });
  echo_config(common.out_dir, "features", {{"manifest", manifest_path}}, cfg);
  out << "features: " << manifest.videos.size() << " videos (" << reused.load()
      << " cached) -> " << common.out_dir << "\n";
}

void cmd_pool(const RunConfig& cfg, bool check_features, const std::string& cache_dir,
              const Common& common, std::ostream& out) {
  validate(cfg.pooling);
  const auto ids = list_feature_caches(cache_dir);
  if (ids.empty()) fail(ErrorKind::kEmptyTensor, "no feature caches in " + cache_dir);
  TrainingSet table;
  std::optional<Provenance> first;
  const std::string version = feature_version_hash();
  for (const auto& id : ids) {
    const FeatureTensor t = read_feature_cache(cache_dir, id);
    const Provenance& p = t.provenance;
    if (p.feature_version != version) {
      fail(ErrorKind::kProvenanceMismatch, id + ": cache was written by another feature version");
    }
    if (check_features) {
      const FeatureConfig& f = cfg.features;
      bool same = p.mode == f.mode && p.features == f.features;
      if (f.mode != FeatureMode::kProjection) {
        same = same && p.pattern == to_string(f.pattern) && p.fov_deg == f.fov_deg &&
               (f.vp_width == 0 || p.vp_width == f.vp_width) &&
               (f.vp_height == 0 || p.vp_height == f.vp_height);
      }
      if (!same) {
        fail(ErrorKind::kProvenanceMismatch,
             id + ": cached features do not match the configured feature settings");
      }
    }
    if (!first) {
      first = p;
      table.layout = FeatureLayout{p.features, t.viewports};
    } else if (!(p == *first) || t.viewports != table.layout.viewports) {
      fail(ErrorKind::kProvenanceMismatch, id + ": caches in " + cache_dir +
                                               " were computed with different settings");
    }
    table.rows.push_back(pooled_row(t, cfg.pooling));
  }
  prepare_out(common.out_dir);
  write_pooled_table(table, out_path(common.out_dir, "pooled.csv"));
  echo_config(common.out_dir, "pool", {{"cache", cache_dir}}, cfg);
  out << "pool: " << table.rows.size() << " videos x " << table.layout.size()
      << " features -> " << out_path(common.out_dir, "pooled.csv") << "\n";
}

void cmd_train(const RunConfig& cfg, const std::string& pooled, const std::string& split_path,
               const Common& common, std::ostream& out) {
  TrainingSet table = read_pooled_table(pooled);
  if (!split_path.empty()) {
    const SplitFile split = read_split_file(split_path);
    check_split_overlap(split);
    table = restrict_to_ids(table, split.train);
  }
  const FittedLearner fitted = fit_learner(table, learner_config(cfg, cfg.tune));
  prepare_out(common.out_dir);
  save_model(fitted.model, out_path(common.out_dir, "model.json"));
  if (fitted.tuning) {
    write_text_file(out_path(common.out_dir, "tune_report.json"),
                    tune_report_to_json(*fitted.tuning, cfg.kind));
  }
  echo_config(common.out_dir, "train", {{"pooled", pooled}, {"split", split_path}}, cfg);
  out << "train: " << describe(cfg.kind, fitted.model.hyperparams) << " on "
      << table.rows.size() << " videos -> " << out_path(common.out_dir, "model.json") << "\n";
}

void cmd_predict(const std::string& model_path, const std::string& pooled, const Common& common,
                 std::ostream& out) {
  const QualityModel model = load_model(model_path);
  const TrainingSet table = read_pooled_table(pooled);
  const auto pred = model.predict(table);
  std::string csv = "video_id,group_id,dmos,prediction\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    csv += r.video_id + "," + r.group_id + "," + format_double(r.dmos) + "," +
           format_double(pred[i]) + "\n";
  }
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "predictions.csv"), csv);
  Json inputs = {{"model", model_path}, {"pooled", pooled}};
  Json j;
  j["command"] = "predict";
  j["inputs"] = inputs;
  write_text_file(out_path(common.out_dir, "resolved_config.json"), j.dump(2) + "\n");
  out << "predict: " << table.rows.size() << " videos -> "
      << out_path(common.out_dir, "predictions.csv") << "\n";
}

struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<double> dmos;
};

ScoreTable read_scores(const std::string& path, const std::string& column) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kParseError, path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorKind::kMissingField, path + " has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = find("video_id");
  const std::size_t dmos_col = find("dmos");
  const std::size_t score_col = find(column);
  ScoreTable t;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::kParseError, path + " line " + std::to_string(line_no) + ": wrong width");
    }
    auto number = [&](const std::string& cell, const char* what) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == cell.size()) return v;
      } catch (const std::exception&) {
      }
      fail(ErrorKind::kParseError, path + " line " + std::to_string(line_no) + ": bad " + what);
    };
    t.ids.push_back(cells[id_col]);
    t.dmos.push_back(number(cells[dmos_col], "dmos"));
    t.scores.push_back(number(cells[score_col], "score"));
  }
  return t;
}

void cmd_evaluate(const std::string& input, const std::string& column, bool logistic,
                  const std::string& split_path, const Common& common, std::ostream& out) {
  const ScoreTable t = read_scores(input, column);
  std::vector<std::size_t> fit_rows, eval_rows;
  if (split_path.empty()) {
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
      fit_rows.push_back(i);
      eval_rows.push_back(i);
    }
  } else {
    const SplitFile split = read_split_file(split_path);
    check_split_overlap(split);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < t.ids.size(); ++i) index[t.ids[i]] = i;
    auto rows_of = [&](const std::vector<std::string>& ids) {
      std::vector<std::size_t> rows;
      for (const auto& id : ids) {
        const auto it = index.find(id);
        if (it != index.end()) rows.push_back(it->second);
      }
      std::sort(rows.begin(), rows.end());
      return rows;
    };
    fit_rows = rows_of(split.train);
    eval_rows = rows_of(split.test);
  }
  auto pick = [](const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    for (std::size_t i : rows) out.push_back(v[i]);
    return out;
  };
  std::vector<double> scores = pick(t.scores, eval_rows);
  const std::vector<double> targets = pick(t.dmos, eval_rows);
  Json j;
  j["column"] = column;
  if (logistic) {
    const Logistic4Params p = fit_logistic4(pick(t.scores, fit_rows), pick(t.dmos, fit_rows));
    scores = apply_logistic4(p, scores);
    j["logistic"] = {p.beta1, p.beta2, p.beta3, p.beta4};
  }
  const std::string descriptor = split_path.empty() ? "all rows" : "test rows of " + fs::path(split_path).filename().string();
  const EvalReport report = evaluate(scores, targets, descriptor);
  j["report"] = Json::parse(to_json(report));
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "report.json"), j.dump(2) + "\n");
  Json inputs = {{"input", input}, {"column", column}, {"logistic_fit", logistic},
                 {"split", split_path}};
  Json c;
  c["command"] = "evaluate";
  c["inputs"] = inputs;
  write_text_file(out_path(common.out_dir, "resolved_config.json"), c.dump(2) + "\n");
  char line[160];
  std::snprintf(line, sizeof line, "evaluate: PLCC %.5f SROCC %.5f RMSE %.5f (n=%zu)\n",
                report.plcc, report.srocc, report.rmse, report.n);
  out << line;
  // DMOS is used as given; log the sign under both orientations so a dataset
  // with the opposite scale direction is easy to spot.
  std::snprintf(line, sizeof line, "evaluate: PLCC vs dmos %+.5f, vs -dmos %+.5f\n",
                report.plcc, -report.plcc);
  out << line;
}

void cmd_cv(const RunConfig& cfg, bool tune, const std::string& pooled, const Common& common,
            std::ostream& out) {
  const TrainingSet table = read_pooled_table(pooled);
  const TrainingSetSource source(table);
  const CvResult r = run_repeated_cv(source, learner_config(cfg, tune), cfg.cv_repeats,
                                     cfg.cv_fraction, cfg.seed);
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "cv_report.json"), cv_result_to_json(r));
  write_text_file(out_path(common.out_dir, "cv_repeats.csv"), cv_repeats_to_csv(r));
  echo_config(common.out_dir, "cv", {{"pooled", pooled}, {"tune", tune}}, cfg);
  char line[200];
  std::snprintf(line, sizeof line,
                "cv: mean PLCC %.5f SROCC %.5f RMSE %.5f over %d repeats (%d excluded)\n",
                r.mean.plcc, r.mean.srocc, r.mean.rmse, r.valid_repeats, r.excluded_repeats);
  out << line;
}

void cmd_sffs(const RunConfig& cfg, int max_features, const std::string& pooled,
              const Common& common, std::ostream& out) {
  const TrainingSet table = read_pooled_table(pooled);
  SffsOptions opts;
  opts.kind = cfg.kind;
  opts.hyperparams = cfg.hyperparams;
  opts.n_repeats = cfg.tune_repeats;
  opts.split_fraction = cfg.tune_fraction;
  opts.seed = cfg.seed;
  const int m = max_features > 0 ? max_features : static_cast<int>(table.layout.features.size());
  const auto steps = sffs(table, m, opts);
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "sffs.json"), sffs_to_json(steps));
  write_text_file(out_path(common.out_dir, "sffs.csv"), sffs_to_csv(steps));
  echo_config(common.out_dir, "sffs", {{"pooled", pooled}, {"max_features", m}}, cfg);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    char line[120];
    std::snprintf(line, sizeof line, "sffs: step %zu +%s PLCC %.5f\n", i + 1,
                  std::string(feature_name(steps[i].added)).c_str(), steps[i].score);
    out << line;
  }
}

void cmd_sweep(const RunConfig& cfg, const std::string& manifest_path,
               const std::vector<std::string>& patterns, const std::vector<double>& fovs,
               const Common& common, std::ostream& out, std::ostream& err) {
  const DatasetManifest manifest = load_manifest(manifest_path, ManifestMode::kTraining);
  for (const auto& w : manifest.warnings) err << "warning: " << w << "\n";
  validate(cfg.pooling);
  std::vector<double> dmos;
  for (const auto& v : manifest.videos) dmos.push_back(*v.dmos);
  std::string csv = "pattern,fov_deg,feature,plcc,srocc,rmse\n";
  for (const auto& pattern_name : patterns) {
    for (double fov : fovs) {
      FeatureConfig f = cfg.features;
      f.mode = FeatureMode::kPerViewport;
      f.pattern = parse_pattern_kind(pattern_name);
      f.fov_deg = fov;
      validate(f);
      std::vector<TrainingRow> rows(manifest.videos.size());
      parallel_for(manifest.videos.size(), resolve_jobs(cfg.jobs), [&](std::size_t i) {
        rows[i] = pooled_row(compute_features(manifest.videos[i], f), cfg.pooling);
      });
      const int m = static_cast<int>(f.features.size());
      for (int k = 0; k < m; ++k) {
        std::vector<double> scores;
        for (const auto& row : rows) {
          const int n_vp = static_cast<int>(row.features.size()) / m;
          double s = 0.0;
          for (int n = 0; n < n_vp; ++n) s += row.features[static_cast<std::size_t>(n) * m + k];
          scores.push_back(s / n_vp);
        }
        EvalReport r;
        r.plcc = r.srocc = r.rmse = std::nan("");
        try {
          const Logistic4Params p = fit_logistic4(scores, dmos);
          r = evaluate(apply_logistic4(p, scores), dmos);
        } catch (const Error& e) {
          err << "warning: " << pattern_name << " " << fov << " "
              << feature_name(f.features[k]) << ": " << e.what() << "\n";
        }
        csv += pattern_name + "," + format_double(fov) + "," +
               std::string(feature_name(f.features[k])) + "," + format_double(r.plcc) + "," +
               format_double(r.srocc) + "," + format_double(r.rmse) + "\n";
      }
    }
  }
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "sweep.csv"), csv);
  Json fov_list = Json::array();
  for (double v : fovs) fov_list.push_back(v);
  echo_config(common.out_dir, "sweep",
              {{"manifest", manifest_path}, {"patterns", patterns}, {"fovs", fov_list}}, cfg);
  out << "sweep: " << patterns.size() * fovs.size() << " configurations -> "
      << out_path(common.out_dir, "sweep.csv") << "\n";
}

void cmd_cross(const RunConfig& cfg, const std::string& train_path, const std::string& test_path,
               const std::vector<std::string>& baselines, const Common& common,
               std::ostream& out) {
  const TrainingSet train = read_pooled_table(train_path);
  const TrainingSet test = read_pooled_table(test_path);
  const SplitResult r = run_cross_dataset(TrainingSetSource(train), TrainingSetSource(test),
                                          learner_config(cfg, cfg.tune), baselines);
  prepare_out(common.out_dir);
  write_text_file(out_path(common.out_dir, "report.json"), split_result_to_json(r));
  write_text_file(out_path(common.out_dir, "predictions.csv"), predictions_to_csv(r.methods[0]));
  echo_config(common.out_dir, "cross", {{"train", train_path}, {"test", test_path}}, cfg);
  char line[160];
  std::snprintf(line, sizeof line, "cross: PLCC %.5f SROCC %.5f RMSE %.5f (n=%zu)\n",
                r.methods[0].report.plcc, r.methods[0].report.srocc, r.methods[0].report.rmse,
                r.methods[0].report.n);
  out << line;
}

void cmd_synth(const SynthOptions& opts, const Common& common, std::ostream& out) {
  const DatasetManifest m = write_synthetic_dataset(opts, common.out_dir);
  out << "synth: " << m.videos.size() << " videos -> " << m.path << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Full-reference quality estimation for 360-degree (ERP) video", "omnivq"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for all commands");

  Common common;
  FeatureFlags feature_flags;
  PoolFlags pool_flags;
  ModelFlags model_flags;
  std::string manifest, cache, pooled, model, split, input, column = "prediction";
  std::string train_table, test_table, patterns = "uniform,tropical,equatorial";
  std::string fovs = "40,60,90", baselines;
  bool logistic = false;
  std::optional<int> repeats;
  std::optional<double> fraction;
  bool cv_tune = false;
  int max_features = 0;
  SynthOptions synth;
  std::string synth_levels = "1,2,3";

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config) {
      cmd->add_option("--config", common.config_path, "Run configuration JSON")
          ->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", common.out_dir, "Output directory")->required();
  };

  auto* features = app.add_subcommand("features", "Render surfaces and write feature caches");
  features->add_option("--manifest", manifest, "Dataset manifest JSON")->required();
  add_common(features, true);
  feature_flags.add(features);
  features->add_option("--jobs", common.jobs, "Parallel videos (default: all cores)");

  auto* pool = app.add_subcommand("pool", "Pool feature caches into one table");
  pool->add_option("--cache", cache, "Feature cache directory")->required();
  add_common(pool, true);
  feature_flags.add(pool);
  pool_flags.add(pool);

  auto* train = app.add_subcommand("train", "Tune and train a regressor");
  train->add_option("--pooled", pooled, "Pooled feature table CSV")->required();
  add_common(train, true);
  train->add_option("--split", split, "Split file; only its [train] ids are used");
  model_flags.add(train, true);

  auto* predict = app.add_subcommand("predict", "Predict DMOS with a trained model");
  predict->add_option("--model", model, "Model JSON")->required();
  predict->add_option("--pooled", pooled, "Pooled feature table CSV")->required();
  add_common(predict, false);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "PLCC, SROCC and RMSE of a score column");
  evaluate_cmd->add_option("--input", input, "CSV with video_id, dmos and the score column")
      ->required();
  evaluate_cmd->add_option("--column", column, "Score column")->capture_default_str();
  evaluate_cmd->add_flag("--logistic-fit", logistic,
                         "Map scores with a 4-parameter logistic fitted on the train rows");
  evaluate_cmd->add_option("--split", split,
                           "Split file: fit on [train], report on [test]");
  add_common(evaluate_cmd, false);

  auto* cv = app.add_subcommand("cv", "Repeated grouped shuffle cross-validation");
  cv->add_option("--pooled", pooled, "Pooled feature table CSV")->required();
  add_common(cv, true);
  cv->add_option("--repeats", repeats, "Number of repeats (default 1000)");
  cv->add_option("--fraction", fraction, "Test share of groups (default 0.2)");
  cv->add_flag("--tune", cv_tune, "Tune hyperparameters inside every repeat");
  model_flags.add(cv, false);

  auto* sffs_cmd = app.add_subcommand("sffs", "Sequential forward feature selection");
  sffs_cmd->add_option("--pooled", pooled, "Pooled feature table CSV")->required();
  add_common(sffs_cmd, true);
  sffs_cmd->add_option("--select", max_features, "Features to select (0 = all)")
      ->capture_default_str();
  model_flags.add(sffs_cmd, true);

  auto* sweep = app.add_subcommand("sweep", "Single-metric correlation per pattern and FoV");
  sweep->add_option("--manifest", manifest, "Dataset manifest JSON")->required();
  add_common(sweep, true);
  sweep->add_option("--patterns", patterns, "Comma-separated sampling patterns")
      ->capture_default_str();
  sweep->add_option("--fovs", fovs, "Comma-separated fields of view in degrees")
      ->capture_default_str();
  sweep->add_option("--features", feature_flags.list, "Comma-separated feature names");
  pool_flags.add(sweep);
  sweep->add_option("--jobs", common.jobs, "Parallel videos (default: all cores)");

  auto* cross = app.add_subcommand("cross", "Train on one dataset, test on another");
  cross->add_option("--train-pooled", train_table, "Pooled table to train on")->required();
  cross->add_option("--test-pooled", test_table, "Pooled table to test on")->required();
  cross->add_option("--baselines", baselines,
                    "Comma-separated pooled columns to evaluate after a logistic fit");
  add_common(cross, true);
  model_flags.add(cross, true);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic ERP dataset");
  add_common(synth_cmd, false);
  synth_cmd->add_option("--contents", synth.contents, "Reference contents")->capture_default_str();
  synth_cmd->add_option("--levels", synth_levels, "Comma-separated distortion strengths")
      ->capture_default_str();
  synth_cmd->add_option("--width", synth.width, "ERP width")->capture_default_str();
  synth_cmd->add_option("--height", synth.height, "ERP height")->capture_default_str();
  synth_cmd->add_option("--frames", synth.frames, "Frames per video")->capture_default_str();
  synth_cmd->add_option("--bit-depth", synth.bit_depth, "Sample bit depth")
      ->capture_default_str();
  synth_cmd->add_option("--dmos-noise", synth.dmos_noise, "Standard deviation of DMOS noise")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: usage: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    RunConfig cfg = load_config(common);
    const bool has_config = !common.config_path.empty();
    if (common.jobs) cfg.jobs = *common.jobs;
    if (*features) {
      feature_flags.apply(cfg.features);
      cmd_features(cfg, manifest, common, out, err);
    } else if (*pool) {
      feature_flags.apply(cfg.features);
      pool_flags.apply(cfg.pooling);
      cmd_pool(cfg, has_config || feature_flags.any(), cache, common, out);
    } else if (*train) {
      model_flags.apply(cfg);
      cmd_train(cfg, pooled, split, common, out);
    } else if (*predict) {
      cmd_predict(model, pooled, common, out);
    } else if (*evaluate_cmd) {
      cmd_evaluate(input, column, logistic, split, common, out);
    } else if (*cv) {
      model_flags.apply(cfg);
      if (repeats) cfg.cv_repeats = *repeats;
      if (fraction) cfg.cv_fraction = *fraction;
      cmd_cv(cfg, cv_tune, pooled, common, out);
    } else if (*sffs_cmd) {
      model_flags.apply(cfg);
      cmd_sffs(cfg, max_features, pooled, common, out);
    } else if (*sweep) {
      feature_flags.apply(cfg.features);
      pool_flags.apply(cfg.pooling);
      std::vector<double> fov_values;
      for (const auto& s : split_list(fovs)) {
        try {
          fov_values.push_back(std::stod(s));
        } catch (const std::exception&) {
          fail(ErrorKind::kInvalidArgument, "bad field of view '" + s + "'");
        }
      }
      cmd_sweep(cfg, manifest, split_list(patterns), fov_values, common, out, err);
    } else if (*cross) {
      model_flags.apply(cfg);
      cmd_cross(cfg, train_table, test_table, split_list(baselines), common, out);
    } else if (*synth_cmd) {
      synth.levels.clear();
      for (const auto& s : split_list(synth_levels)) {
        try {
          synth.levels.push_back(std::stod(s));
        } catch (const std::exception&) {
          fail(ErrorKind::kInvalidArgument, "bad distortion level '" + s + "'");
        }
      }
      cmd_synth(synth, common, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace omnivq
