#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reef/dataset.hpp"

namespace reef {

/// Σ −pᵢ log₂ pᵢ with 0·log 0 = 0. Proportions must lie in [0, 1] and sum
/// to 1 within 1e-9.
double entropy(std::span<const double> proportions);

struct TreeConfig {
  std::optional<std::size_t> max_depth;  // unset: unlimited
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse_reduction = 0.0;
};

/// Gains closer than this fraction of the parent SSE are treated as ties, and
/// a split must reduce SSE by more than it.
constexpr double kSplitGainTolerance = 1e-12;

/// Best variance-reducing split of `rows` over `features` (all when empty).
/// Thresholds are midpoints between consecutive distinct sorted values; rows
/// with value ≤ threshold go left. Ties go to the lowest feature index, then
/// the lowest threshold.
std::optional<SplitCandidate> best_split(const ReefDataset& data,
                                         std::span<const std::size_t> rows,
                                         const TreeConfig& cfg,
                                         std::span<const std::size_t> features = {});

/// Flat array of nodes; node 0 is the root.
class RegressionTree {
 public:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
  };

  RegressionTree() = default;
  RegressionTree(std::vector<Node> nodes, std::size_t feature_count);

  double predict(std::span<const double> features) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t feature_count() const { return feature_count_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<Node> nodes_;
  std::size_t feature_count_ = 0;
};

RegressionTree fit_tree(const ReefDataset& train, const TreeConfig& cfg);

struct ForestConfig {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_features;  // unset: ceil(p / 3)
  bool bootstrap = true;
  std::uint64_t seed = 0;
  TreeConfig tree;
};

/// Trees index the original feature columns directly (features are
/// subsampled per split, not per tree).
struct RandomForest {
  std::vector<RegressionTree> trees;
  ForestConfig config;  // max_features resolved

  double predict(std::span<const double> features) const;
};

/// Tree k draws its bootstrap rows and per-split feature subsets from
/// SplitMix64(derive_seed(seed, "tree/k")).
RandomForest fit_forest(const ReefDataset& train, const ForestConfig& cfg);

double predict_tree(const RegressionTree& tree, std::span<const double> features);
double predict_forest(const RandomForest& forest, std::span<const double> features);

}  // namespace reef
