#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "reef/dataset.hpp"
#include "reef/ensemble.hpp"

namespace reef {

// Model documents:
//   linear        {kind:"linear", intercept, weights[], feature_names[]}
//   svr           {kind:"svr", kernel:{kind,degree,gamma,coef0}, support_vectors[][],
//                  coefficients[], bias}
//   tree          {kind:"decision_tree", feature_count, root}
//                 node = {feature, threshold, left, right} | {leaf_value}
//   forest        {kind:"random_forest", config, trees[root...]}
//   ensemble      {kind:"ensemble", aggregation:"mean", members:[file...]}
// Every document also carries "name", and files written by save_model carry
// "feature_names" and an optional "standardizer" {mean[], std[]}.

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json tree_config_to_json(const TreeConfig& cfg);
TreeConfig tree_config_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::vector<std::string>& feature_names,
                const std::optional<Standardizer>& standardizer);

/// Member paths are stored relative to the manifest's directory.
void save_ensemble_manifest(const std::filesystem::path& path, const std::string& name,
                            const std::vector<std::filesystem::path>& member_files,
                            const std::vector<std::string>& feature_names,
                            const std::optional<Standardizer>& standardizer);

/// A model file or ensemble manifest ready to score raw feature rows.
struct LoadedPredictor {
  std::string name;
  std::vector<std::string> feature_names;
  std::optional<Standardizer> standardizer;
  std::variant<TrainedModel, EnsembleModel> model;

  /// Applies the stored standardizer, then the model.
  double predict(std::span<const double> raw_features) const;
};

LoadedPredictor load_predictor(const std::filesystem::path& path);

}  // namespace reef
