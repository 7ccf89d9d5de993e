#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reef/dataset.hpp"
#include "reef/ensemble.hpp"
#include "reef/metrics.hpp"

namespace reef {

/// Everything a `train` or `plotdata` run needs. All randomness derives from
/// `seed`: the split uses derive_seed(seed, "split"), roster entry i that is
/// a forest uses derive_seed(seed, "forest/i"), and a bootstrapped ensemble
/// uses derive_seed(seed, "ensemble").
struct RunConfig {
  std::filesystem::path data_path;
  std::filesystem::path out_dir = "out";
  SchemaConfig schema = SchemaConfig::reef_default();
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
  bool standardize = true;
  std::vector<ModelSpec> roster;  // empty: default_roster()
  bool ensemble = true;
  bool ensemble_bootstrap = false;
};

/// Keys: data, out, seed, train_fraction, standardize, schema{columns},
/// roster[], ensemble{enabled, bootstrap}. Missing keys keep defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// Roster with derived forest seeds filled in.
std::vector<ModelSpec> resolve_roster(const RunConfig& cfg);

struct TrainOutcome {
  bool ok = false;
  std::string failed_stage;
  std::string error;
  EvalReport report;
};

/// ingest → split → standardize → train roster → ensemble → evaluate.
/// Writes models/*.json, models/ensemble.json, report.txt, report.csv,
/// train_split.csv, test_split.csv and manifest.json under cfg.out_dir. The
/// manifest is written on failure too, naming the failed stage.
TrainOutcome run_train(const RunConfig& cfg);

/// Scores every row of `input_csv` with each model file and writes one
/// prediction column per model. Extra input columns are ignored.
void run_predict(const std::vector<std::filesystem::path>& model_files,
                 const std::filesystem::path& input_csv, const std::filesystem::path& output_csv);

/// One (feature, target) CSV per retained non-binary feature under
/// cfg.out_dir/plotdata. Returns the files written, in schema order.
std::vector<std::filesystem::path> run_plotdata(const RunConfig& cfg);

/// Fixed weights for the 18-feature synthetic reef analog.
Vector reef_synthetic_weights();
constexpr double kReefSyntheticIntercept = 5.0;

/// Synthetic data under the default reef schema: uniform[-1,1] features,
/// Day/Night encoded as x > 0, target on the hyperplane of the encoded
/// features plus noise calibrated to the requested R².
ReefDataset make_reef_synthetic(std::size_t n, std::uint64_t seed, double target_r2);

/// Writes make_reef_synthetic output with Day/Night rendered as text.
void write_reef_csv(const ReefDataset& data, const std::filesystem::path& path);

std::string slugify(const std::string& name);

}  // namespace reef
