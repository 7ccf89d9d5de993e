#include "reef/ensemble.hpp"

#include <cmath>

#include "reef/error.hpp"
#include "reef/rng.hpp"

namespace reef {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double TrainedModel::predict(std::span<const double> features) const {
  return std::visit([&](const auto& m) { return m.predict(features); }, model);
}

std::size_t TrainedModel::feature_count() const {
  return std::visit(overloaded{
                        [](const LinearModel& m) { return m.weights.size(); },
                        [](const SvrModel& m) { return m.support_vectors.cols(); },
                        [](const RegressionTree& m) { return m.feature_count(); },
                        [](const RandomForest& m) { return m.trees.front().feature_count(); },
                    },
                    model);
}

TrainedModel fit_model(const ModelSpec& spec, const ReefDataset& train) {
  return std::visit(
      overloaded{
          [&](const OlsConfig&) { return TrainedModel{spec.name, fit_ols(train)}; },
          [&](const RidgeConfig& c) { return TrainedModel{spec.name, fit_ridge(train, c)}; },
          [&](const SvrConfig& c) {
            SvrModel m = fit_svr(train, c);
            // An SVR that leaves no support vector has no column count; keep
            // the training width so schema checks still work.
            if (m.support_vectors.rows() == 0) m.support_vectors = Matrix(0, train.feature_count());
            return TrainedModel{spec.name, std::move(m)};
          },
          [&](const TreeConfig& c) { return TrainedModel{spec.name, fit_tree(train, c)}; },
          [&](const ForestConfig& c) { return TrainedModel{spec.name, fit_forest(train, c)}; },
      },
      spec.params);
}

EnsembleModel::EnsembleModel(std::vector<TrainedModel> m) : members(std::move(m)) {
  if (members.empty()) throw ConfigError("an ensemble needs at least one member");
  const std::size_t p = members.front().feature_count();
  for (const auto& member : members) {
    if (member.feature_count() != p) {
      throw DimensionError("ensemble member \"" + member.name + "\" expects " +
                           std::to_string(member.feature_count()) + " features, first member " +
                           std::to_string(p));
    }
  }
}

double EnsembleModel::predict(std::span<const double> features) const {
  std::vector<double> preds;
  preds.reserve(members.size());
  for (const auto& m : members) preds.push_back(m.predict(features));
  return stable_mean(preds);
}

double predict_ensemble(const EnsembleModel& model, std::span<const double> features) {
  return model.predict(features);
}

EnsembleModel fit_ensemble(const ReefDataset& train, const std::vector<ModelSpec>& member_specs,
                           bool bootstrap, std::uint64_t seed) {
  if (member_specs.empty()) throw ConfigError("an ensemble needs at least one member spec");
  if (train.empty()) throw EmptyDatasetError("fit_ensemble needs at least one row");
  std::vector<TrainedModel> members;
  for (std::size_t i = 0; i < member_specs.size(); ++i) {
    const auto& spec = member_specs[i];
    try {
      if (bootstrap) {
        SplitMix64 rng(derive_seed(seed, "ensemble/" + std::to_string(i)));
        std::vector<std::size_t> rows(train.size());
        for (auto& r : rows) r = static_cast<std::size_t>(rng.below(train.size()));
        members.push_back(fit_model(spec, train.subset(rows)));
      } else {
        members.push_back(fit_model(spec, train));
      }
    } catch (const std::exception& e) {
      throw Error("ensemble member " + std::to_string(i) + " (" + spec.name +
                  ") failed to fit: " + e.what());
    }
  }
  return EnsembleModel(std::move(members));
}

std::vector<ModelSpec> default_roster(std::uint64_t forest_seed) {
  auto svr = [](KernelKind kind) {
    SvrConfig c;
    c.kernel.kind = kind;
    return c;
  };
  ForestConfig forest;
  forest.seed = forest_seed;
  return {
      {"Linear Regression", OlsConfig{}},
      {"SVR Linear", svr(KernelKind::linear)},
      {"SVR Poly", svr(KernelKind::polynomial)},
      {"SVR RBF", svr(KernelKind::rbf)},
      {"Decision Trees", TreeConfig{}},
      {"Random Forests", forest},
      {"Ridge Regression", RidgeConfig{1.0}},
  };
}

}  // namespace reef
