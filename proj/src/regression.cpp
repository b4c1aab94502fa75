// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include "omnivq/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omnivq/error.hpp"
#include "omnivq/evaluation.hpp"

namespace omnivq {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kModelSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Tree growing

class TreeBuilder {
 public:
  TreeBuilder(std::span<const double> x, int n_features, std::span<const double> y,
              const TreeOptions& opts, std::uint64_t seed)
      : x_(x), d_(n_features), y_(y), opts_(opts), rng_(seed) {
    pool_.resize(d_);
    std::iota(pool_.begin(), pool_.end(), 0);
    const int k = opts_.max_features;
    max_features_ = (k <= 0 || k >= d_) ? d_ : k;
  }

  RegressionTree build(std::vector<std::size_t> sample) {
    RegressionTree tree;
    nodes_ = &tree.nodes;
    grow(sample, 0);
    return tree;
  }

 private:
  double feature(std::size_t row, int f) const {
    return x_[row * static_cast<std::size_t>(d_) + f];
  }

  std::vector<int> candidates() {
    if (max_features_ == d_) return pool_;
    for (int i = 0; i < max_features_; ++i) {
      std::uniform_int_distribution<int> pick(i, d_ - 1);
      std::swap(pool_[i], pool_[pick(rng_)]);
    }
    std::vector<int> out(pool_.begin(), pool_.begin() + max_features_);
    std::sort(out.begin(), out.end());
    return out;
  }

  int make_leaf(double value) {
    TreeNode node;
    node.leaf_value = value;
    nodes_->push_back(node);
    return static_cast<int>(nodes_->size() - 1);
  }

  int grow(std::vector<std::size_t>& sample, int depth) {
    const std::size_t n = sample.size();
    double sum = 0.0;
    for (std::size_t r : sample) sum += y_[r];
    const double mean = sum / static_cast<double>(n);

    bool constant = true;
    double centered_ss = 0.0;
    for (std::size_t r : sample) {
      if (y_[r] != y_[sample.front()]) constant = false;
      centered_ss += (y_[r] - mean) * (y_[r] - mean);
    }
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(opts_.min_samples_leaf, 1));
    if (constant || n < 2 * min_leaf ||
        (opts_.max_depth > 0 && depth >= opts_.max_depth)) {
      return make_leaf(mean);
    }

    // Score of a split = sum_L^2 / n_L + sum_R^2 / n_R over centred targets,
    // i.e. the reduction of the squared error.
    double best_score = 1e-12 * centered_ss;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, std::size_t>> column(n);
    for (int f : candidates()) {
      for (std::size_t i = 0; i < n; ++i) column[i] = {feature(sample[i], f), i};
      std::sort(column.begin(), column.end());
      double total = 0.0;
      for (const auto& c : column) total += y_[sample[c.second]] - mean;
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left += y_[sample[column[i].second]] - mean;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        if (!(column[i].first < column[i + 1].first)) continue;
        const double right = total - left;
        const double score = left * left / static_cast<double>(n_left) +
                             right * right / static_cast<double>(n_right);
        if (score > best_score) {
          best_score = score;
          best_feature = f;
          double t = 0.5 * (column[i].first + column[i + 1].first);
          if (!(t < column[i + 1].first)) t = column[i].first;
          best_threshold = t;
        }
      }
    }
    if (best_feature < 0) return make_leaf(mean);

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : sample) {
      (feature(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    const int id = static_cast<int>(nodes_->size());
    TreeNode node;
    node.feature_index = best_feature;
    node.threshold = best_threshold;
    nodes_->push_back(node);
    sample.clear();
    sample.shrink_to_fit();
    const int l = grow(left_rows, depth + 1);
    const int r = grow(right_rows, depth + 1);
    (*nodes_)[id].left = l;
    (*nodes_)[id].right = r;
    return id;
  }

  std::span<const double> x_;
  int d_;
  std::span<const double> y_;
  TreeOptions opts_;
  std::mt19937_64 rng_;
  std::vector<int> pool_;
  int max_features_ = 0;
  std::vector<TreeNode>* nodes_ = nullptr;
};

// ---------------------------------------------------------------------------

struct Matrix {
  std::vector<double> x;
  std::vector<double> y;
  int d = 0;
  std::size_t n = 0;
};

Matrix to_matrix(const TrainingSet& data) {
  Matrix m;
  m.n = data.rows.size();
  m.d = static_cast<int>(data.layout.size());
  m.x.reserve(m.n * m.d);
  for (const auto& row : data.rows) {
    if (row.features.size() != static_cast<std::size_t>(m.d)) {
      fail(ErrorKind::kLayoutMismatch,
           "row '" + row.video_id + "' has " + std::to_string(row.features.size()) +
               " features, layout expects " + std::to_string(m.d));
    }
    for (double v : row.features) {
      if (!std::isfinite(v)) {
        fail(ErrorKind::kNonFiniteInput, "non-finite feature in row '" + row.video_id + "'");
      }
      m.x.push_back(v);
    }
    if (!std::isfinite(row.dmos)) {
      fail(ErrorKind::kNonFiniteInput, "non-finite target in row '" + row.video_id + "'");
    }
    m.y.push_back(row.dmos);
  }
  return m;
}

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

SvrParameters fit_svr(const Matrix& m, const Hyperparams& hp) {
  SvrParameters svr;
  const int d = m.d;
  const std::size_t n = m.n;
  svr.scaler_mean.assign(d, 0.0);
  svr.scaler_std.assign(d, 0.0);
  for (int f = 0; f < d; ++f) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m.x[i * d + f];
    const double mu = s / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (m.x[i * d + f] - mu) * (m.x[i * d + f] - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    svr.scaler_mean[f] = mu;
    svr.scaler_std[f] = sd > 0.0 ? sd : 1.0;
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < d; ++f) z[i][f] = (m.x[i * d + f] - svr.scaler_mean[f]) / svr.scaler_std[f];
  }
  svr.gamma = hp.gamma > 0.0 ? hp.gamma : 1.0 / static_cast<double>(std::max(d, 1));
  svr.intercept = std::accumulate(m.y.begin(), m.y.end(), 0.0) / static_cast<double>(n);

  // Dual coordinate descent on 1/2 b'Qb - t'b + eps |b|_1, |b_i| <= C, with
  // the bias folded into the kernel (Q = K + 1).
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = rbf(z[i], z[j], svr.gamma) + 1.0;
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }
  std::vector<double> beta(n, 0.0), grad(n, 0.0);
  for (int sweep = 0; sweep < 1000; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double qii = q[i * n + i];
      const double s = grad[i] - qii * beta[i] - (m.y[i] - svr.intercept);
      double b = 0.0;
      if (s < -hp.epsilon) {
        b = -(s + hp.epsilon) / qii;
      } else if (s > hp.epsilon) {
        b = -(s - hp.epsilon) / qii;
      }
      b = std::clamp(b, -hp.c, hp.c);
      const double delta = b - beta[i];
      if (delta != 0.0) {
        for (std::size_t j = 0; j < n; ++j) grad[j] += delta * q[j * n + i];
        beta[i] = b;
        max_change = std::max(max_change, std::fabs(delta));
      }
    }
    if (max_change < 1e-7) break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] != 0.0) {
      svr.support_vectors.push_back(z[i]);
      svr.coefficients.push_back(beta[i]);
    }
  }
  return svr;
}

std::vector<double> predict_rows(const QualityModel& model, const Matrix& m,
                                 std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    out.push_back(model.predict(std::span<const double>(m.x).subspan(r * m.d, m.d)));
  }
  return out;
}

Json hyperparams_to_json(const Hyperparams& hp) {
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

Hyperparams hyperparams_from_json(const Json& j) {
  Hyperparams hp;
  hp.n_trees = j.value("n_trees", hp.n_trees);
  hp.max_depth = j.value("max_depth", hp.max_depth);
  hp.min_samples_leaf = j.value("min_samples_leaf", hp.min_samples_leaf);
  if (j.contains("max_features")) {
    hp.max_features = parse_max_features(j.at("max_features").get<std::string>());
  }
  hp.bootstrap = j.value("bootstrap", hp.bootstrap);
  hp.learning_rate = j.value("learning_rate", hp.learning_rate);
  hp.c = j.value("c", hp.c);
  hp.epsilon = j.value("epsilon", hp.epsilon);
  hp.gamma = j.value("gamma", hp.gamma);
  return hp;
}

bool better(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(incumbent)) return true;
  return candidate > incumbent;
}

}  // namespace

// ---------------------------------------------------------------------------
// Layout and data plumbing

std::vector<std::string> FeatureLayout::column_names() const {
  std::vector<std::string> names;
  names.reserve(size());
  for (int n = 0; n < viewports; ++n) {
    for (FeatureId id : features) {
      names.push_back("v" + std::to_string(n) + "_" + std::string(feature_name(id)));
    }
  }
  return names;
}

FeatureLayout layout_from_columns(std::span<const std::string> columns) {
  FeatureLayout layout;
  layout.viewports = 0;
  std::vector<std::pair<int, FeatureId>> parsed;
  for (const auto& col : columns) {
    const auto underscore = col.find('_');
    if (col.size() < 3 || col[0] != 'v' || underscore == std::string::npos) {
      fail(ErrorKind::kParseError, "malformed feature column '" + col + "'");
    }
    int vp = 0;
    try {
      vp = std::stoi(col.substr(1, underscore - 1));
    } catch (const std::exception&) {
      fail(ErrorKind::kParseError, "malformed feature column '" + col + "'");
    }
    parsed.emplace_back(vp, parse_feature(col.substr(underscore + 1)));
  }
  for (const auto& [vp, id] : parsed) {
    if (vp != 0) break;
    layout.features.push_back(id);
  }
  if (layout.features.empty() || parsed.size() % layout.features.size() != 0) {
    fail(ErrorKind::kParseError, "feature columns do not form a viewport-major layout");
  }
  layout.viewports = static_cast<int>(parsed.size() / layout.features.size());
  if (layout.column_names() != std::vector<std::string>(columns.begin(), columns.end())) {
    fail(ErrorKind::kParseError, "feature columns do not form a viewport-major layout");
  }
  return layout;
}

std::vector<std::string> TrainingSet::groups() const {
  std::vector<std::string> g;
  g.reserve(rows.size());
  for (const auto& r : rows) g.push_back(r.group_id);
  return g;
}

std::vector<double> TrainingSet::targets() const {
  std::vector<double> t;
  t.reserve(rows.size());
  for (const auto& r : rows) t.push_back(r.dmos);
  return t;
}

std::size_t TrainingSet::distinct_groups() const {
  std::set<std::string> g;
  for (const auto& r : rows) g.insert(r.group_id);
  return g.size();
}

TrainingSet materialize(const RowSource& source, std::span<const std::size_t> indices) {
  TrainingSet out;
  out.layout = source.layout();
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(source.row(i));
  return out;
}

TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> indices) {
  return materialize(TrainingSetSource(data), indices);
}

TrainingSet select_features(const TrainingSet& data, std::span<const FeatureId> ids) {
  std::vector<int> keep;
  TrainingSet out;
  out.layout.viewports = data.layout.viewports;
  for (std::size_t k = 0; k < data.layout.features.size(); ++k) {
    const FeatureId id = data.layout.features[k];
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
      keep.push_back(static_cast<int>(k));
      out.layout.features.push_back(id);
    }
  }
  if (keep.size() != ids.size()) {
    fail(ErrorKind::kLayoutMismatch, "requested feature ids are not all in the layout");
  }
  const std::size_t m = data.layout.features.size();
  out.rows.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    TrainingRow r = row;
    r.features.clear();
    for (int n = 0; n < data.layout.viewports; ++n) {
      for (int k : keep) r.features.push_back(row.features[n * m + k]);
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRfr: return "rfr";
    case ModelKind::kGbr: return "gbr";
    case ModelKind::kSvr: return "svr";
  }
  return "rfr";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "rfr") return ModelKind::kRfr;
  if (name == "gbr") return ModelKind::kGbr;
  if (name == "svr") return ModelKind::kSvr;
  fail(ErrorKind::kInvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(MaxFeatures m) {
  switch (m) {
    case MaxFeatures::kAll: return "all";
    case MaxFeatures::kSqrt: return "sqrt";
    case MaxFeatures::kThird: return "third";
  }
  return "all";
}

MaxFeatures parse_max_features(std::string_view name) {
  if (name == "all") return MaxFeatures::kAll;
  if (name == "sqrt") return MaxFeatures::kSqrt;
  if (name == "third") return MaxFeatures::kThird;
  fail(ErrorKind::kInvalidArgument, "unknown max_features '" + std::string(name) + "'");
}

int resolve_max_features(MaxFeatures m, int n_features) {
  switch (m) {
    case MaxFeatures::kAll: return n_features;
    case MaxFeatures::kSqrt:
      return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_features))));
    case MaxFeatures::kThird: return std::max(1, n_features / 3);
  }
  return n_features;
}

std::string describe(ModelKind kind, const Hyperparams& hp) {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::kRfr:
      os << "rfr trees=" << hp.n_trees << " depth=" << hp.max_depth
         << " min_leaf=" << hp.min_samples_leaf << " max_features=" << to_string(hp.max_features)
         << " bootstrap=" << (hp.bootstrap ? 1 : 0);
      break;
    case ModelKind::kGbr:
      os << "gbr trees=" << hp.n_trees << " depth=" << hp.max_depth
         << " lr=" << hp.learning_rate << " min_leaf=" << hp.min_samples_leaf;
      break;
    case ModelKind::kSvr:
      os << "svr C=" << hp.c << " eps=" << hp.epsilon << " gamma=" << hp.gamma;
      break;
  }
  return os.str();
}

std::vector<Hyperparams> default_grid(ModelKind kind) {
  std::vector<Hyperparams> grid;
  switch (kind) {
    case ModelKind::kRfr:
      for (int trees : {100, 300}) {
        for (int depth : {8, 16, 0}) {
          for (int leaf : {1, 5}) {
            for (MaxFeatures mf : {MaxFeatures::kSqrt, MaxFeatures::kThird}) {
              Hyperparams hp;
              hp.n_trees = trees;
              hp.max_depth = depth;
              hp.min_samples_leaf = leaf;
              hp.max_features = mf;
              grid.push_back(hp);
            }
          }
        }
      }
      break;
    case ModelKind::kGbr:
      for (double lr : {0.05, 0.1}) {
        for (int trees : {200, 500}) {
          for (int depth : {2, 3}) {
            Hyperparams hp;
            hp.learning_rate = lr;
            hp.n_trees = trees;
            hp.max_depth = depth;
            hp.max_features = MaxFeatures::kAll;
            hp.bootstrap = false;
            grid.push_back(hp);
          }
        }
      }
      break;
    case ModelKind::kSvr:
      for (double c : {1.0, 10.0, 100.0}) {
        for (double eps : {0.1, 1.0}) {
          Hyperparams hp;
          hp.c = c;
          hp.epsilon = eps;
          grid.push_back(hp);
        }
      }
      break;
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Models

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature_index >= 0) {
    const TreeNode& node = nodes[i];
    i = x[node.feature_index] <= node.threshold ? node.left : node.right;
  }
  return nodes[i].leaf_value;
}

RegressionTree fit_tree(std::span<const double> x, int n_features,
                        std::span<const double> y,
                        std::span<const std::size_t> sample,
                        const TreeOptions& opts, std::uint64_t seed) {
  if (sample.empty()) fail(ErrorKind::kInvalidArgument, "fit_tree on an empty sample");
  TreeBuilder builder(x, n_features, y, opts, seed);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

double QualityModel::predict(std::span<const double> x) const {
  if (x.size() != layout.size()) {
    fail(ErrorKind::kLayoutMismatch,
         "feature vector has " + std::to_string(x.size()) + " entries, model expects " +
             std::to_string(layout.size()));
  }
  switch (kind) {
    case ModelKind::kRfr: {
      double s = 0.0;
      for (const auto& t : trees) s += t.predict(x);
      return s / static_cast<double>(trees.size());
    }
    case ModelKind::kGbr: {
      double s = 0.0;
      for (const auto& t : trees) s += t.predict(x);
      return base_value + hyperparams.learning_rate * s;
    }
    case ModelKind::kSvr: {
      std::vector<double> z(x.size());
      for (std::size_t f = 0; f < x.size(); ++f) {
        z[f] = (x[f] - svr.scaler_mean[f]) / svr.scaler_std[f];
      }
      double s = svr.intercept;
      for (std::size_t k = 0; k < svr.coefficients.size(); ++k) {
        s += svr.coefficients[k] * (rbf(z, svr.support_vectors[k], svr.gamma) + 1.0);
      }
      return s;
    }
  }
  return 0.0;
}

std::vector<double> QualityModel::predict(const TrainingSet& data) const {
  if (!(data.layout == layout)) {
    fail(ErrorKind::kLayoutMismatch, "data layout differs from the model layout");
  }
  std::vector<double> out;
  out.reserve(data.rows.size());
  for (const auto& row : data.rows) out.push_back(predict(row.features));
  return out;
}

QualityModel train(const TrainingSet& data, ModelKind kind, const Hyperparams& hp,
                   std::uint64_t seed) {
  if (data.rows.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty");
  if (data.distinct_groups() < 2) {
    fail(ErrorKind::kTooFewGroups, "training needs rows from at least 2 groups");
  }
  const Matrix m = to_matrix(data);

  QualityModel model;
  model.kind = kind;
  model.layout = data.layout;
  model.hyperparams = hp;
  model.seed = seed;

  const auto [lo, hi] = std::minmax_element(m.y.begin(), m.y.end());
  if (*lo == *hi) {
    std::cerr << "warning: all training targets equal " << *lo
              << "; fitting a constant model\n";
    switch (kind) {
      case ModelKind::kRfr: {
        RegressionTree leaf;
        leaf.nodes.push_back(TreeNode{-1, 0.0, -1, -1, *lo});
        model.trees.push_back(leaf);
        break;
      }
      case ModelKind::kGbr:
        model.base_value = *lo;
        break;
      case ModelKind::kSvr:
        model.svr.gamma = 1.0;
        model.svr.intercept = *lo;
        model.svr.scaler_mean.assign(m.d, 0.0);
        model.svr.scaler_std.assign(m.d, 1.0);
        break;
    }
    return model;
  }

  switch (kind) {
    case ModelKind::kRfr: {
      if (hp.n_trees < 1) fail(ErrorKind::kInvalidArgument, "forest needs n_trees >= 1");
      TreeOptions opts{hp.max_depth, hp.min_samples_leaf,
                       resolve_max_features(hp.max_features, m.d)};
      std::vector<std::size_t> sample(m.n);
      for (int t = 0; t < hp.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        if (hp.bootstrap) {
          std::mt19937_64 rng(tree_seed);
          std::uniform_int_distribution<std::size_t> pick(0, m.n - 1);
          for (auto& s : sample) s = pick(rng);
        } else {
          std::iota(sample.begin(), sample.end(), 0);
        }
        model.trees.push_back(fit_tree(m.x, m.d, m.y, sample, opts, derive_seed(tree_seed, 1)));
      }
      break;
    }
    case ModelKind::kGbr: {
      if (hp.n_trees < 1) fail(ErrorKind::kInvalidArgument, "boosting needs n_trees >= 1");
      TreeOptions opts{hp.max_depth, hp.min_samples_leaf,
                       resolve_max_features(hp.max_features, m.d)};
      model.base_value = std::accumulate(m.y.begin(), m.y.end(), 0.0) / static_cast<double>(m.n);
      std::vector<double> current(m.n, model.base_value);
      std::vector<double> residual(m.n);
      std::vector<std::size_t> sample(m.n);
      std::iota(sample.begin(), sample.end(), 0);
      for (int t = 0; t < hp.n_trees; ++t) {
        for (std::size_t i = 0; i < m.n; ++i) residual[i] = m.y[i] - current[i];
        RegressionTree tree = fit_tree(m.x, m.d, residual, sample, opts,
                                       derive_seed(seed, static_cast<std::uint64_t>(t)));
        for (std::size_t i = 0; i < m.n; ++i) {
          current[i] += hp.learning_rate *
                        tree.predict(std::span<const double>(m.x).subspan(i * m.d, m.d));
        }
        model.trees.push_back(std::move(tree));
      }
      break;
    }
    case ModelKind::kSvr:
      model.svr = fit_svr(m, hp);
      break;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Persistence

std::string model_to_json(const QualityModel& model) {
  Json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = std::string(to_string(model.kind));
  Json layout;
  Json features = Json::array();
  for (FeatureId id : model.layout.features) features.push_back(std::string(feature_name(id)));
  layout["features"] = features;
  layout["viewports"] = model.layout.viewports;
  j["feature_layout"] = layout;
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  j["seed"] = model.seed;
  j["base_value"] = model.base_value;
  Json trees = Json::array();
  for (const auto& tree : model.trees) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes) {
      Json node;
      node["feature_index"] = n.feature_index;
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
      node["leaf_value"] = n.leaf_value;
      nodes.push_back(node);
    }
    Json t;
    t["nodes"] = nodes;
    trees.push_back(t);
  }
  j["trees"] = trees;
  if (model.kind == ModelKind::kSvr) {
    Json svr;
    svr["gamma"] = model.svr.gamma;
    svr["intercept"] = model.svr.intercept;
    svr["scaler_mean"] = model.svr.scaler_mean;
    svr["scaler_std"] = model.svr.scaler_std;
    svr["support_vectors"] = model.svr.support_vectors;
    svr["coefficients"] = model.svr.coefficients;
    j["svr"] = svr;
  }
  return j.dump(1) + "\n";
}

QualityModel model_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParseError, std::string("model file: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) {
      fail(ErrorKind::kParseError, "unsupported model schema version");
    }
    QualityModel model;
    model.kind = parse_model_kind(j.at("kind").get<std::string>());
    for (const auto& name : j.at("feature_layout").at("features")) {
      model.layout.features.push_back(parse_feature(name.get<std::string>()));
    }
    model.layout.viewports = j.at("feature_layout").at("viewports").get<int>();
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    model.seed = j.at("seed").get<std::uint64_t>();
    model.base_value = j.at("base_value").get<double>();
    for (const auto& t : j.at("trees")) {
      RegressionTree tree;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        node.feature_index = n.at("feature_index").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.leaf_value = n.at("leaf_value").get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) fail(ErrorKind::kParseError, "model contains an empty tree");
      model.trees.push_back(std::move(tree));
    }
    if (model.kind == ModelKind::kSvr) {
      const auto& s = j.at("svr");
      model.svr.gamma = s.at("gamma").get<double>();
      model.svr.intercept = s.at("intercept").get<double>();
      model.svr.scaler_mean = s.at("scaler_mean").get<std::vector<double>>();
      model.svr.scaler_std = s.at("scaler_std").get<std::vector<double>>();
      model.svr.support_vectors = s.at("support_vectors").get<std::vector<std::vector<double>>>();
      model.svr.coefficients = s.at("coefficients").get<std::vector<double>>();
    } else if (model.trees.empty() && model.kind == ModelKind::kRfr) {
      fail(ErrorKind::kParseError, "forest model without trees");
    }
    return model;
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParseError, std::string("model file: ") + e.what());
  }
}

void save_model(const QualityModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write model file " + path);
  out << model_to_json(model);
  if (!out) fail(ErrorKind::kIoError, "failed writing model file " + path);
}

QualityModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot read model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Model selection

CvScore grouped_cv_score(const TrainingSet& data, ModelKind kind,
                         const Hyperparams& hp, int n_repeats,
                         double split_fraction, std::uint64_t seed) {
  if (data.distinct_groups() < 2) {
    fail(ErrorKind::kTooFewGroups, "cross-validation needs at least 2 groups");
  }
  const auto groups = data.groups();
  const auto targets = data.targets();
  const Matrix m = to_matrix(data);
  CvScore score;
  double sum = 0.0;
  for (int r = 0; r < n_repeats; ++r) {
    const std::uint64_t split_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const GroupSplit split = grouped_shuffle_split(groups, split_fraction, split_seed);
    const QualityModel model = train(subset(data, split.train), kind, hp, derive_seed(split_seed, 1));
    const auto pred = predict_rows(model, m, split.test);
    std::vector<double> truth;
    for (std::size_t i : split.test) truth.push_back(targets[i]);
    try {
      sum += plcc(pred, truth);
      ++score.valid_repeats;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kZeroVariance && e.kind() != ErrorKind::kInvalidArgument) throw;
      ++score.excluded_repeats;
    }
  }
  score.mean_plcc = score.valid_repeats > 0
                        ? sum / score.valid_repeats
                        : std::numeric_limits<double>::quiet_NaN();
  return score;
}

TuneReport tune_hyperparams(const TrainingSet& data, ModelKind kind,
                            std::span<const Hyperparams> grid, int n_repeats,
                            double split_fraction, std::uint64_t seed) {
  if (grid.empty()) fail(ErrorKind::kInvalidArgument, "empty hyperparameter grid");
  if (data.distinct_groups() < 2) {
    fail(ErrorKind::kTooFewGroups, "tuning needs at least 2 groups");
  }
  TuneReport report;
  double best = std::numeric_limits<double>::quiet_NaN();
  report.best = grid.front();
  for (const Hyperparams& hp : grid) {
    const CvScore s = grouped_cv_score(data, kind, hp, n_repeats, split_fraction, seed);
    report.table.push_back({hp, s});
    if (better(s.mean_plcc, best)) {
      best = s.mean_plcc;
      report.best = hp;
    }
  }
  return report;
}

std::vector<SffsStep> sffs(const TrainingSet& data, int max_features,
                           const SffsOptions& opts) {
  const auto& ids = data.layout.features;
  if (max_features < 1 || max_features > static_cast<int>(ids.size())) {
    fail(ErrorKind::kInvalidArgument,
         "max_features must lie in [1, " + std::to_string(ids.size()) + "]");
  }
  if (data.distinct_groups() < 2) {
    fail(ErrorKind::kTooFewGroups, "feature selection needs at least 2 groups");
  }
  std::vector<FeatureId> selected;
  std::vector<SffsStep> steps;
  for (int step = 0; step < max_features; ++step) {
    double best = std::numeric_limits<double>::quiet_NaN();
    std::optional<FeatureId> best_id;
    for (FeatureId candidate : ids) {
      if (std::find(selected.begin(), selected.end(), candidate) != selected.end()) continue;
      std::vector<FeatureId> trial = selected;
      trial.push_back(candidate);
      const TrainingSet reduced = select_features(data, trial);
      const CvScore s = grouped_cv_score(reduced, opts.kind, opts.hyperparams, opts.n_repeats,
                                         opts.split_fraction, opts.seed);
      if (!best_id || better(s.mean_plcc, best)) {
        best = s.mean_plcc;
        best_id = candidate;
      }
    }
    selected.push_back(*best_id);
    steps.push_back({*best_id, best, selected});
  }
  return steps;
}

}  // namespace omnivq
