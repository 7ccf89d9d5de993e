#include "reef/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "reef/error.hpp"
#include "reef/model_io.hpp"
#include "reef/rng.hpp"

namespace reef {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Tracks the current stage so failures can name it.
struct Stage {
  std::string name;
  void enter(std::string s) { name = std::move(s); }
};

}  // namespace

std::string slugify(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "column" : out;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    if (j.contains("data")) cfg.data_path = j.at("data").get<std::string>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    cfg.standardize = j.value("standardize", cfg.standardize);
    if (j.contains("schema")) cfg.schema = schema_from_json(j.at("schema"));
    if (j.contains("roster")) {
      for (const auto& m : j.at("roster")) cfg.roster.push_back(spec_from_json(m));
      if (cfg.roster.empty()) throw ConfigError("roster must not be empty");
    }
    if (j.contains("ensemble")) {
      cfg.ensemble = j.at("ensemble").value("enabled", cfg.ensemble);
      cfg.ensemble_bootstrap = j.at("ensemble").value("bootstrap", cfg.ensemble_bootstrap);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid run config: ") + e.what());
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1]");
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json roster = json::array();
  for (const auto& m : resolve_roster(cfg)) roster.push_back(spec_to_json(m));
  return {{"data", cfg.data_path.generic_string()},
          {"out", cfg.out_dir.generic_string()},
          {"seed", cfg.seed},
          {"train_fraction", cfg.train_fraction},
          {"standardize", cfg.standardize},
          {"schema", schema_to_json(cfg.schema)},
          {"roster", roster},
          {"ensemble", {{"enabled", cfg.ensemble}, {"bootstrap", cfg.ensemble_bootstrap}}}};
}

std::vector<ModelSpec> resolve_roster(const RunConfig& cfg) {
  std::vector<ModelSpec> roster = cfg.roster.empty() ? default_roster(0) : cfg.roster;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (auto* f = std::get_if<ForestConfig>(&roster[i].params)) {
      f->seed = derive_seed(cfg.seed, "forest/" + std::to_string(i));
    }
  }
  return roster;
}

TrainOutcome run_train(const RunConfig& cfg) {
  TrainOutcome outcome;
  Stage stage;
  json manifest = {{"status", "running"}};
  const fs::path models_dir = cfg.out_dir / "models";

  try {
    stage.enter("config");
    fs::create_directories(models_dir);
    const auto roster = resolve_roster(cfg);
    manifest["config"] = run_config_to_json(cfg);
    const std::uint64_t split_seed = derive_seed(cfg.seed, "split");
    const std::uint64_t ensemble_seed = derive_seed(cfg.seed, "ensemble");
    manifest["seeds"] = {{"root", cfg.seed}, {"split", split_seed}, {"ensemble", ensemble_seed}};

    stage.enter("ingest");
    const auto ingested = ingest_csv(cfg.data_path, cfg.schema);
    manifest["data"] = {{"rows", ingested.data.size()},
                        {"rows_removed", ingested.rows_removed},
                        {"features", ingested.data.feature_names()},
                        {"target", ingested.data.target_name()}};

    stage.enter("split");
    const auto parts = split(ingested.data, {cfg.train_fraction, split_seed});
    if (parts.test.empty()) throw EmptyDatasetError("test split is empty; lower train_fraction");
    export_csv(parts.train, cfg.out_dir / "train_split.csv");
    export_csv(parts.test, cfg.out_dir / "test_split.csv");
    manifest["split"] = {{"train", parts.train.size()}, {"test", parts.test.size()}};

    stage.enter("standardize");
    std::optional<Standardizer> scaler;
    ReefDataset train = parts.train, test = parts.test;
    if (cfg.standardize) {
      scaler = fit_standardizer(parts.train);
      train = apply_standardizer(*scaler, parts.train);
      test = apply_standardizer(*scaler, parts.test);
      manifest["standardizer"] = standardizer_to_json(*scaler);
    }

    const auto names = train.feature_names();
    std::vector<TrainedModel> trained;
    std::vector<fs::path> files;
    json model_entries = json::array();
    for (std::size_t i = 0; i < roster.size(); ++i) {
      stage.enter("train:" + roster[i].name);
      trained.push_back(fit_model(roster[i], train));
      char prefix[8];
      std::snprintf(prefix, sizeof prefix, "%02zu_", i);
      const fs::path file = models_dir / (prefix + slugify(roster[i].name) + ".json");
      save_model(file, trained.back(), names, scaler);
      files.push_back(file.filename());
      json entry = {{"name", roster[i].name}, {"file", "models/" + file.filename().string()}};
      if (const auto* svr = std::get_if<SvrModel>(&trained.back().model)) {
        entry["converged"] = svr->converged;
        entry["iterations"] = svr->iterations;
        entry["support_vectors"] = svr->support_vectors.rows();
        entry["gamma"] = *svr->kernel.gamma;
      }
      model_entries.push_back(entry);
    }

    std::vector<NamedPredictor> predictors;
    for (const auto& m : trained) {
      predictors.push_back({m.name, [&m](std::span<const double> x) { return m.predict(x); }});
    }

    std::optional<EnsembleModel> ensemble;
    if (cfg.ensemble) {
      stage.enter("ensemble");
      const std::string name = "Bagging Ensemble";
      if (cfg.ensemble_bootstrap) {
        ensemble = fit_ensemble(train, roster, true, ensemble_seed);
        files.clear();
        for (std::size_t i = 0; i < ensemble->members.size(); ++i) {
          char prefix[16];
          std::snprintf(prefix, sizeof prefix, "ens_%02zu_", i);
          const fs::path file =
              models_dir / (prefix + slugify(ensemble->members[i].name) + ".json");
          save_model(file, ensemble->members[i], names, scaler);
          files.push_back(file.filename());
        }
      } else {
        // Same data and configs as the roster fits, so reuse those members.
        ensemble = EnsembleModel(trained);
      }
      save_ensemble_manifest(models_dir / "ensemble.json", name, files, names, scaler);
      model_entries.push_back({{"name", name}, {"file", "models/ensemble.json"}});
      predictors.push_back(
          {name, [&ensemble](std::span<const double> x) { return ensemble->predict(x); }});
    }
    manifest["models"] = model_entries;

    stage.enter("evaluate");
    outcome.report = evaluate_all(predictors, test);
    outcome.report.split = "train " + std::to_string(parts.train.size()) + " / test " +
                           std::to_string(parts.test.size()) + " (fraction " +
                           shortest(cfg.train_fraction) + ", seed " + std::to_string(cfg.seed) + ")";
    outcome.report.config = manifest["config"];

    stage.enter("write");
    write_text(cfg.out_dir / "report.txt", render_text(outcome.report));
    write_text(cfg.out_dir / "report.csv", render_csv(outcome.report));
    manifest["status"] = "ok";
    write_json(cfg.out_dir / "manifest.json", manifest);
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.failed_stage = stage.name;
    outcome.error = e.what();
    manifest["status"] = "failed";
    manifest["failed_stage"] = stage.name;
    manifest["error"] = e.what();
    try {
      fs::create_directories(cfg.out_dir);
      write_json(cfg.out_dir / "manifest.json", manifest);
    } catch (const std::exception&) {
    }
  }
  return outcome;
}

void run_predict(const std::vector<fs::path>& model_files, const fs::path& input_csv,
                 const fs::path& output_csv) {
  if (model_files.empty()) throw ConfigError("predict needs at least one model file");
  std::vector<LoadedPredictor> models;
  for (const auto& f : model_files) models.push_back(load_predictor(f));

  std::ifstream in(input_csv);
  if (!in) throw SchemaError("cannot open input " + input_csv.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("input " + input_csv.string() + " has no header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  // Column positions per model, in the model's feature order.
  std::vector<std::vector<std::size_t>> positions;
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<std::size_t> pos;
    std::vector<std::string> missing;
    for (const auto& name : models[m].feature_names) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) missing.push_back(name);
      else pos.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    if (!missing.empty()) {
      std::string msg = "input " + input_csv.string() + " does not match model " +
                        model_files[m].string() + "; missing columns:";
      for (const auto& name : missing) msg += " \"" + name + "\"";
      std::string extra;
      for (const auto& h : header) {
        if (std::find(models[m].feature_names.begin(), models[m].feature_names.end(), h) ==
            models[m].feature_names.end()) {
          extra += " \"" + h + "\"";
        }
      }
      if (!extra.empty()) msg += "; extra columns:" + extra;
      throw SchemaError(msg);
    }
    positions.push_back(std::move(pos));
  }

  std::ostringstream out;
  for (std::size_t m = 0; m < models.size(); ++m) {
    out << (m ? "," : "") << quote(models[m].name.empty() ? "prediction" : models[m].name);
  }
  out << '\n';
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    for (std::size_t m = 0; m < models.size(); ++m) {
      std::vector<double> x;
      for (std::size_t p : positions[m]) {
        std::optional<double> v;
        if (p < fields.size()) {
          v = parse_cell(fields[p], ColumnKind::feature_numeric);
          if (!v) v = parse_cell(fields[p], ColumnKind::feature_binary);
        }
        if (!v) {
          throw SchemaError("input line " + std::to_string(line_no) + ": column \"" + header[p] +
                            "\" is missing or not numeric");
        }
        x.push_back(*v);
      }
      out << (m ? "," : "") << shortest(models[m].predict(x));
    }
    out << '\n';
  }
  write_text(output_csv, out.str());
}

std::vector<fs::path> run_plotdata(const RunConfig& cfg) {
  const auto data = ingest_csv(cfg.data_path, cfg.schema).data;
  const fs::path dir = cfg.out_dir / "plotdata";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    const auto& f = data.features()[j];
    if (f.kind == ColumnKind::feature_binary) continue;
    std::string text = quote(f.name) + "," + quote(data.target_name()) + "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      text += shortest(data.x()(i, j)) + "," + shortest(data.target(i)) + "\n";
    }
    const fs::path file = dir / (slugify(f.name) + ".csv");
    write_text(file, text);
    written.push_back(file);
  }
  return written;
}

Vector reef_synthetic_weights() {
  return Vector({14.0, -10.5, 8.75, 7.0, -5.25, 3.5, 12.25, -7.0, 5.25, -3.5, 1.75, 7.0, -8.75,
                 10.5, -1.75, 3.5, 7.0, -5.25});
}

ReefDataset make_reef_synthetic(std::size_t n, std::uint64_t seed, double target_r2) {
  const Vector w = reef_synthetic_weights();
  const auto schema = SchemaConfig::reef_default();
  const auto features = schema.features();
  if (features.size() != w.size()) throw Error("reef schema and synthetic weights disagree");
  const auto raw = generate_synthetic(n, w.size(), w, kReefSyntheticIntercept,
                                      noise_sd_for_r2(w, target_r2), seed);
  std::vector<double> xs = raw.x().data();
  std::vector<double> ys = raw.y().values();
  const std::size_t p = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (features[j].kind != ColumnKind::feature_binary) continue;
      const double old = xs[i * p + j];
      const double encoded = old > 0.0 ? 1.0 : 0.0;
      xs[i * p + j] = encoded;
      ys[i] += w[j] * (encoded - old);
    }
  }
  return ReefDataset(features, schema.target(), Matrix(n, p, std::move(xs)), Vector(std::move(ys)));
}

void write_reef_csv(const ReefDataset& data, const fs::path& path) {
  std::string text;
  for (const auto& f : data.features()) text += quote(f.name) + ",";
  text += quote(data.target_name()) + "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
      const double v = data.x()(i, j);
      if (data.features()[j].kind == ColumnKind::feature_binary) {
        text += v > 0.5 ? "Day," : "Night,";
      } else {
        text += shortest(v) + ",";
      }
    }
    text += shortest(data.target(i)) + "\n";
  }
  write_text(path, text);
}

}  // namespace reef
