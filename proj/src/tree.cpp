#include "reef/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "reef/error.hpp"
#include "reef/rng.hpp"

namespace reef {
namespace {

using FeaturePicker = std::function<std::vector<std::size_t>()>;

class TreeBuilder {
 public:
  TreeBuilder(const ReefDataset& data, const TreeConfig& cfg, FeaturePicker pick)
      : data_(data), cfg_(cfg), pick_(std::move(pick)) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return RegressionTree(std::move(nodes_), data_.feature_count());
  }

 private:
  std::size_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    double sum = 0.0;
    for (std::size_t r : rows) sum += data_.target(r);
    nodes_[id].value = sum / static_cast<double>(rows.size());

    const bool depth_left = !cfg_.max_depth || depth < *cfg_.max_depth;
    if (!depth_left || rows.size() < cfg_.min_samples_split) return id;
    const auto features = pick_();
    const auto split = best_split(data_, rows, cfg_, features);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (data_.x()(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::size_t l = grow(std::move(left), depth + 1);
    const std::size_t rt = grow(std::move(right), depth + 1);
    auto& node = nodes_[id];
    node.leaf = false;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = rt;
    return id;
  }

  const ReefDataset& data_;
  const TreeConfig& cfg_;
  FeaturePicker pick_;
  std::vector<RegressionTree::Node> nodes_;
};

void validate(const TreeConfig& cfg) {
  if (cfg.min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
  if (cfg.min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
}

}  // namespace

double entropy(std::span<const double> proportions) {
  double total = 0.0, h = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("entropy: proportion outside [0, 1]");
    total += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("entropy: proportions sum to " + std::to_string(total) + ", not 1");
  }
  return h;
}

std::optional<SplitCandidate> best_split(const ReefDataset& data,
                                         std::span<const std::size_t> rows,
                                         const TreeConfig& cfg,
                                         std::span<const std::size_t> features) {
  const std::size_t n = rows.size();
  if (n == 0 || n < cfg.min_samples_split || n < 2 * cfg.min_samples_leaf) return std::nullopt;

  std::vector<std::size_t> all;
  if (features.empty()) {
    all.resize(data.feature_count());
    std::iota(all.begin(), all.end(), 0);
    features = all;
  }

  const double first = data.target(rows[0]);
  bool constant = true;
  double mean = 0.0;
  for (std::size_t r : rows) {
    mean += data.target(r);
    constant = constant && data.target(r) == first;
  }
  if (constant) return std::nullopt;
  mean /= static_cast<double>(n);

  // Work on centered targets so the gain formula does not cancel.
  double parent_sse = 0.0, total = 0.0;
  std::vector<double> yc(n);
  for (std::size_t k = 0; k < n; ++k) {
    yc[k] = data.target(rows[k]) - mean;
    parent_sse += yc[k] * yc[k];
    total += yc[k];
  }
  const double tie = kSplitGainTolerance * parent_sse;
  const double base = total * total / static_cast<double>(n);

  std::optional<SplitCandidate> best;
  double best_gain = tie;  // must exceed this to count as a reduction
  std::vector<std::size_t> order(n);
  for (std::size_t f : features) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data.x()(rows[a], f) < data.x()(rows[b], f);
    });
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += yc[order[k]];
      const double v = data.x()(rows[order[k]], f);
      const double next = data.x()(rows[order[k + 1]], f);
      if (v == next) continue;
      const std::size_t nl = k + 1, nr = n - nl;
      if (nl < cfg.min_samples_leaf || nr < cfg.min_samples_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) - base;
      if (gain > best_gain + (best ? tie : 0.0)) {
        double threshold = 0.5 * (v + next);
        if (threshold >= next) threshold = v;
        best = SplitCandidate{f, threshold, gain};
        best_gain = gain;
      }
    }
  }
  return best;
}

RegressionTree::RegressionTree(std::vector<Node> nodes, std::size_t feature_count)
    : nodes_(std::move(nodes)), feature_count_(feature_count) {
  if (nodes_.empty()) throw Error("a regression tree needs at least one node");
  for (const auto& node : nodes_) {
    if (!node.leaf && (node.left >= nodes_.size() || node.right >= nodes_.size() ||
                       node.feature >= feature_count_)) {
      throw Error("malformed regression tree node");
    }
  }
}

double RegressionTree::predict(std::span<const double> features) const {
  if (features.size() != feature_count_) {
    throw DimensionError("tree expects " + std::to_string(feature_count_) + " features, got " +
                         std::to_string(features.size()));
  }
  std::size_t id = 0;
  while (!nodes_[id].leaf) {
    const auto& node = nodes_[id];
    id = features[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].value;
}

std::size_t RegressionTree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t id) -> std::size_t {
    const auto& node = nodes_[id];
    return node.leaf ? 0 : 1 + std::max(rec(node.left), rec(node.right));
  };
  return rec(0);
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

RegressionTree fit_tree(const ReefDataset& train, const TreeConfig& cfg) {
  validate(cfg);
  if (train.empty()) throw EmptyDatasetError("fit_tree needs at least one row");
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> features(train.feature_count());
  std::iota(features.begin(), features.end(), 0);
  return TreeBuilder(train, cfg, [&] { return features; }).build(std::move(rows));
}

double RandomForest::predict(std::span<const double> features) const {
  std::vector<double> preds;
  preds.reserve(trees.size());
  for (const auto& t : trees) preds.push_back(t.predict(features));
  return stable_mean(preds);
}

RandomForest fit_forest(const ReefDataset& train, const ForestConfig& cfg) {
  validate(cfg.tree);
  if (train.empty()) throw EmptyDatasetError("fit_forest needs at least one row");
  if (cfg.n_trees < 1) throw ConfigError("n_trees must be at least 1");
  const std::size_t n = train.size(), p = train.feature_count();
  ForestConfig resolved = cfg;
  if (!resolved.max_features) resolved.max_features = std::max<std::size_t>(1, (p + 2) / 3);
  const std::size_t mf = *resolved.max_features;
  if (mf < 1 || mf > p) {
    throw ConfigError("max_features must lie in [1, " + std::to_string(p) + "], got " +
                      std::to_string(mf));
  }

  RandomForest forest{{}, resolved};
  forest.trees.reserve(cfg.n_trees);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    SplitMix64 rng(derive_seed(cfg.seed, "tree/" + std::to_string(t)));
    std::vector<std::size_t> rows(n);
    if (cfg.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    std::vector<std::size_t> pool(p);
    FeaturePicker pick = [&]() {
      std::iota(pool.begin(), pool.end(), 0);
      if (mf >= p) return pool;
      for (std::size_t k = 0; k < mf; ++k) std::swap(pool[k], pool[k + rng.below(p - k)]);
      std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(mf));
      std::sort(chosen.begin(), chosen.end());
      return chosen;
    };
    forest.trees.push_back(TreeBuilder(train, resolved.tree, pick).build(std::move(rows)));
  }
  return forest;
}

double predict_tree(const RegressionTree& tree, std::span<const double> features) {
  return tree.predict(features);
}

double predict_forest(const RandomForest& forest, std::span<const double> features) {
  return forest.predict(features);
}

}  // namespace reef
