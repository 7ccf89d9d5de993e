#include "reef/model_io.hpp"

#include <fstream>
#include <sstream>

#include "reef/error.hpp"

namespace reef {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json optional_size(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::size_t> optional_size(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::size_t>();
}

json kernel_to_json(const KernelSpec& k) {
  return {{"kind", to_string(k.kind)},
          {"degree", k.degree},
          {"gamma", k.gamma ? json(*k.gamma) : json("scale")},
          {"coef0", k.coef0}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
  k.degree = j.value("degree", 3);
  k.coef0 = j.value("coef0", 0.0);
  if (j.contains("gamma") && j.at("gamma").is_number()) k.gamma = j.at("gamma").get<double>();
  return k;
}

json node_to_json(const RegressionTree& tree, std::size_t id) {
  const auto& node = tree.nodes()[id];
  if (node.leaf) return {{"leaf_value", node.value}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"left", node_to_json(tree, node.left)},
          {"right", node_to_json(tree, node.right)}};
}

std::size_t node_from_json(const json& j, std::vector<RegressionTree::Node>& nodes) {
  const std::size_t id = nodes.size();
  nodes.emplace_back();
  if (j.contains("leaf_value")) {
    nodes[id].value = j.at("leaf_value").get<double>();
    return id;
  }
  const std::size_t l = node_from_json(j.at("left"), nodes);
  const std::size_t r = node_from_json(j.at("right"), nodes);
  auto& node = nodes[id];
  node.leaf = false;
  node.feature = j.at("feature").get<std::size_t>();
  node.threshold = j.at("threshold").get<double>();
  node.left = l;
  node.right = r;
  return id;
}

json tree_to_json(const RegressionTree& tree) { return node_to_json(tree, 0); }

RegressionTree tree_from_json(const json& root, std::size_t feature_count) {
  std::vector<RegressionTree::Node> nodes;
  node_from_json(root, nodes);
  return RegressionTree(std::move(nodes), feature_count);
}

json forest_config_to_json(const ForestConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_features", optional_size(c.max_features)},
          {"bootstrap", c.bootstrap},
          {"seed", c.seed},
          {"tree", tree_config_to_json(c.tree)}};
}

ForestConfig forest_config_from_json(const json& j) {
  ForestConfig c;
  c.n_trees = j.value("n_trees", c.n_trees);
  c.max_features = optional_size(j, "max_features");
  c.bootstrap = j.value("bootstrap", c.bootstrap);
  c.seed = j.value("seed", c.seed);
  if (j.contains("tree")) c.tree = tree_config_from_json(j.at("tree"));
  return c;
}

std::vector<double> to_vector(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

json tree_config_to_json(const TreeConfig& cfg) {
  return {{"max_depth", optional_size(cfg.max_depth)},
          {"min_samples_split", cfg.min_samples_split},
          {"min_samples_leaf", cfg.min_samples_leaf}};
}

TreeConfig tree_config_from_json(const json& j) {
  TreeConfig c;
  c.max_depth = optional_size(j, "max_depth");
  c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  return c;
}

json model_to_json(const TrainedModel& model) {
  json j = std::visit(
      overloaded{
          [](const LinearModel& m) {
            return json{{"kind", "linear"},
                        {"intercept", m.intercept},
                        {"weights", m.weights.values()},
                        {"feature_names", m.feature_names}};
          },
          [](const SvrModel& m) {
            json svs = json::array();
            for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
              const auto r = m.support_vectors.row(i);
              svs.push_back(std::vector<double>(r.begin(), r.end()));
            }
            return json{{"kind", "svr"},
                        {"kernel", kernel_to_json(m.kernel)},
                        {"feature_count", m.support_vectors.cols()},
                        {"support_vectors", svs},
                        {"coefficients", m.coefficients.values()},
                        {"bias", m.bias},
                        {"converged", m.converged},
                        {"iterations", m.iterations}};
          },
          [](const RegressionTree& m) {
            return json{{"kind", "decision_tree"},
                        {"feature_count", m.feature_count()},
                        {"root", tree_to_json(m)}};
          },
          [](const RandomForest& m) {
            json trees = json::array();
            for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
            return json{{"kind", "random_forest"},
                        {"feature_count", m.trees.front().feature_count()},
                        {"config", forest_config_to_json(m.config)},
                        {"trees", trees}};
          },
      },
      model.model);
  j["name"] = model.name;
  return j;
}

TrainedModel model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::string name = j.value("name", kind);
  if (kind == "linear") {
    return {name, LinearModel{j.at("intercept").get<double>(), Vector(to_vector(j.at("weights"))),
                              j.value("feature_names", std::vector<std::string>{})}};
  }
  if (kind == "svr") {
    const auto& svs = j.at("support_vectors");
    const std::size_t p = j.at("feature_count").get<std::size_t>();
    std::vector<double> flat;
    for (const auto& r : svs) {
      const auto row = to_vector(r);
      if (row.size() != p) throw DimensionError("support vector width does not match feature_count");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    SvrModel m;
    m.support_vectors = Matrix(svs.size(), p, std::move(flat));
    m.coefficients = Vector(to_vector(j.at("coefficients")));
    if (m.coefficients.size() != m.support_vectors.rows()) {
      throw DimensionError("SVR coefficient count does not match support vector count");
    }
    m.bias = j.at("bias").get<double>();
    m.kernel = kernel_from_json(j.at("kernel"));
    m.converged = j.value("converged", true);
    m.iterations = j.value("iterations", std::size_t{0});
    return {name, std::move(m)};
  }
  if (kind == "decision_tree") {
    return {name, tree_from_json(j.at("root"), j.at("feature_count").get<std::size_t>())};
  }
  if (kind == "random_forest") {
    RandomForest f;
    f.config = forest_config_from_json(j.at("config"));
    const std::size_t p = j.at("feature_count").get<std::size_t>();
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t, p));
    if (f.trees.empty()) throw Error("random forest document has no trees");
    return {name, std::move(f)};
  }
  throw ConfigError("unknown model kind: " + kind);
}

json spec_to_json(const ModelSpec& spec) {
  json j = std::visit(
      overloaded{
          [](const OlsConfig&) { return json{{"type", "ols"}}; },
          [](const RidgeConfig& c) { return json{{"type", "ridge"}, {"lambda", c.lambda}}; },
          [](const SvrConfig& c) {
            json k = kernel_to_json(c.kernel);
            return json{{"type", "svr"},         {"c", c.c},
                        {"epsilon", c.epsilon},  {"kernel", k.at("kind")},
                        {"degree", k.at("degree")}, {"gamma", k.at("gamma")},
                        {"coef0", k.at("coef0")}, {"tol", c.tol},
                        {"max_passes", c.max_passes}};
          },
          [](const TreeConfig& c) {
            json j = tree_config_to_json(c);
            j["type"] = "decision_tree";
            return j;
          },
          [](const ForestConfig& c) {
            json j = forest_config_to_json(c);
            j["type"] = "random_forest";
            return j;
          },
      },
      spec.params);
  j["name"] = spec.name;
  return j;
}

ModelSpec spec_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const std::string name = j.value("name", type);
  if (type == "ols" || type == "linear") return {name, OlsConfig{}};
  if (type == "ridge") return {name, RidgeConfig{j.value("lambda", 1.0)}};
  if (type == "svr") {
    SvrConfig c;
    c.c = j.value("c", c.c);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.tol = j.value("tol", c.tol);
    c.max_passes = j.value("max_passes", c.max_passes);
    json k = {{"kind", j.value("kernel", std::string("rbf"))},
              {"degree", j.value("degree", 3)},
              {"coef0", j.value("coef0", 0.0)}};
    if (j.contains("gamma")) k["gamma"] = j.at("gamma");
    c.kernel = kernel_from_json(k);
    return {name, c};
  }
  if (type == "decision_tree") return {name, tree_config_from_json(j)};
  if (type == "random_forest") return {name, forest_config_from_json(j)};
  throw ConfigError("unknown model type in roster: " + type);
}

json standardizer_to_json(const Standardizer& s) { return {{"mean", s.mean}, {"std", s.std}}; }

Standardizer standardizer_from_json(const json& j) {
  Standardizer s{to_vector(j.at("mean")), to_vector(j.at("std"))};
  if (s.mean.size() != s.std.size()) throw DimensionError("standardizer mean/std length mismatch");
  return s;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::vector<std::string>& feature_names,
                const std::optional<Standardizer>& standardizer) {
  json j = model_to_json(model);
  j["feature_names"] = feature_names;
  if (standardizer) j["standardizer"] = standardizer_to_json(*standardizer);
  write_json(path, j);
}

void save_ensemble_manifest(const std::filesystem::path& path, const std::string& name,
                            const std::vector<std::filesystem::path>& member_files,
                            const std::vector<std::string>& feature_names,
                            const std::optional<Standardizer>& standardizer) {
  json members = json::array();
  const auto base = path.parent_path();
  for (const auto& m : member_files) {
    members.push_back(m.is_absolute() ? m.lexically_relative(base).generic_string()
                                      : m.generic_string());
  }
  json j = {{"kind", "ensemble"},
            {"name", name},
            {"aggregation", "mean"},
            {"members", members},
            {"feature_names", feature_names}};
  if (standardizer) j["standardizer"] = standardizer_to_json(*standardizer);
  write_json(path, j);
}

double LoadedPredictor::predict(std::span<const double> raw_features) const {
  std::vector<double> x(raw_features.begin(), raw_features.end());
  if (standardizer) x = apply_standardizer(*standardizer, raw_features);
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

LoadedPredictor load_predictor(const std::filesystem::path& path) {
  const json j = read_json(path);
  LoadedPredictor out;
  out.name = j.value("name", std::string());
  out.feature_names = j.value("feature_names", std::vector<std::string>{});
  if (j.contains("standardizer")) out.standardizer = standardizer_from_json(j.at("standardizer"));

  if (j.value("kind", std::string()) == "ensemble") {
    if (j.value("aggregation", std::string("mean")) != "mean") {
      throw ConfigError("unsupported ensemble aggregation in " + path.string());
    }
    std::vector<TrainedModel> members;
    for (const auto& m : j.at("members")) {
      members.push_back(model_from_json(read_json(path.parent_path() / m.get<std::string>())));
    }
    out.model = EnsembleModel(std::move(members));
  } else {
    out.model = model_from_json(j);
  }
  const std::size_t p = std::visit([](const auto& m) { return m.feature_count(); }, out.model);
  if (!out.feature_names.empty() && out.feature_names.size() != p) {
    throw DimensionError("model file " + path.string() + " lists " +
                         std::to_string(out.feature_names.size()) + " feature names for a " +
                         std::to_string(p) + "-feature model");
  }
  return out;
}

}  // namespace reef
