// reefgpr: train, evaluate and apply the reef production-rate regressors.
//
//   reefgpr train    --data reef.csv [--config run.json] [--out dir] [--seed N]
//   reefgpr predict  --model m.json [--model m2.json ...] --data rows.csv --out preds.csv
//   reefgpr plotdata --data reef.csv [--config run.json] [--out dir]
//   reefgpr synth    --out reef.csv [--rows 505] [--seed N] [--r2 0.91]

#include <iostream>

#include "CLI11.hpp"
#include "reef/error.hpp"
#include "reef/model_io.hpp"
#include "reef/pipeline.hpp"

namespace {

reef::RunConfig load_config(const std::string& config_path, const std::string& data,
                            const std::string& out, const std::optional<std::uint64_t>& seed) {
  reef::RunConfig cfg;
  if (!config_path.empty()) cfg = reef::run_config_from_json(reef::read_json(config_path));
  if (!data.empty()) cfg.data_path = data;
  if (!out.empty()) cfg.out_dir = out;
  if (seed) cfg.seed = *seed;
  if (cfg.data_path.empty()) throw reef::ConfigError("no data file given (--data or config \"data\")");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coral reef gross production rate regression toolkit"};
  app.require_subcommand(1);

  std::string config_path, data, out;
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "Train the model roster and write the evaluation report");
  train->add_option("--config", config_path, "Run config JSON");
  train->add_option("--data", data, "Input CSV");
  train->add_option("--out", out, "Output directory");
  train->add_option("--seed", seed, "Root seed");

  std::vector<std::string> model_files;
  auto* predict = app.add_subcommand("predict", "Score rows with saved model files");
  predict->add_option("--model", model_files, "Model JSON or ensemble manifest")->required();
  predict->add_option("--data", data, "Input CSV")->required();
  predict->add_option("--out", out, "Predictions CSV")->required();

  auto* plot = app.add_subcommand("plotdata", "Export per-feature scatter data");
  plot->add_option("--config", config_path, "Run config JSON");
  plot->add_option("--data", data, "Input CSV");
  plot->add_option("--out", out, "Output directory");
  plot->add_option("--seed", seed, "Root seed (unused; accepted for symmetry)");

  std::size_t rows = 505;
  double r2 = 0.91;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset in the default reef schema");
  synth->add_option("--out", out, "Output CSV")->required();
  synth->add_option("--rows", rows, "Row count");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--r2", r2, "Theoretical R² of the generated target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const auto cfg = load_config(config_path, data, out, seed);
      const auto outcome = reef::run_train(cfg);
      if (!outcome.ok) {
        std::cerr << "train failed at stage " << outcome.failed_stage << ": " << outcome.error
                  << "\n";
        return 1;
      }
      std::cout << reef::render_text(outcome.report);
    } else if (*predict) {
      std::vector<std::filesystem::path> files(model_files.begin(), model_files.end());
      reef::run_predict(files, data, out);
    } else if (*plot) {
      const auto cfg = load_config(config_path, data, out, seed);
      const auto files = reef::run_plotdata(cfg);
      std::cout << "wrote " << files.size() << " files to " << (cfg.out_dir / "plotdata").string()
                << "\n";
    } else if (*synth) {
      reef::write_reef_csv(reef::make_reef_synthetic(rows, synth_seed, r2), out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
