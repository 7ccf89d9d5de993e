#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reef/dataset.hpp"

namespace reef {

/// 1 − SS_res / SS_tot. Throws when y_true is constant.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);
double mse(std::span<const double> y_true, std::span<const double> y_pred);
double mae(std::span<const double> y_true, std::span<const double> y_pred);

struct EvalRow {
  std::string model_name;
  double r2 = 0.0;
  double mse = 0.0;
  double mae = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string split;       // e.g. "train 303 / test 202 (fraction 0.6)"
  nlohmann::json config;   // echo of the run configuration
};

using PredictFn = std::function<double(std::span<const double>)>;

struct NamedPredictor {
  std::string name;
  PredictFn predict;
};

/// One row per model in the given order. Names must be unique.
EvalReport evaluate_all(const std::vector<NamedPredictor>& models, const ReefDataset& test);

/// Fixed six-decimal rendering used by both report formats.
std::string format_metric(double v);

/// Aligned text table: header "Algorithm / Metric  R2  MSE  MAE".
std::string render_text(const EvalReport& report);

/// CSV with header model,r2,mse,mae.
std::string render_csv(const EvalReport& report);

}  // namespace reef
