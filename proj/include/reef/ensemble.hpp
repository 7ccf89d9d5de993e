#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reef/dataset.hpp"
#include "reef/linear.hpp"
#include "reef/svr.hpp"
#include "reef/tree.hpp"

namespace reef {

struct OlsConfig {};

using ModelParams = std::variant<OlsConfig, RidgeConfig, SvrConfig, TreeConfig, ForestConfig>;

/// A named model configuration, e.g. {"SVR RBF", SvrConfig{...}}.
struct ModelSpec {
  std::string name;
  ModelParams params;
};

/// Fitted parameters of any supported model behind one prediction call.
struct TrainedModel {
  std::string name;
  std::variant<LinearModel, SvrModel, RegressionTree, RandomForest> model;

  double predict(std::span<const double> features) const;
  std::size_t feature_count() const;
};

TrainedModel fit_model(const ModelSpec& spec, const ReefDataset& train);

/// Mean of member predictions (stable_mean, member order).
struct EnsembleModel {
  std::vector<TrainedModel> members;

  explicit EnsembleModel(std::vector<TrainedModel> members);
  double predict(std::span<const double> features) const;
  std::size_t feature_count() const { return members.front().feature_count(); }
};

/// Without bootstrap every member sees the full training set. With bootstrap
/// member i trains on a size-n resample drawn from
/// SplitMix64(derive_seed(seed, "ensemble/i")).
EnsembleModel fit_ensemble(const ReefDataset& train, const std::vector<ModelSpec>& member_specs,
                           bool bootstrap, std::uint64_t seed);

double predict_ensemble(const EnsembleModel& model, std::span<const double> features);

/// Paper roster in report order: Linear Regression, SVR Linear, SVR Poly,
/// SVR RBF, Decision Trees, Random Forests, Ridge Regression.
std::vector<ModelSpec> default_roster(std::uint64_t forest_seed);

}  // namespace reef
