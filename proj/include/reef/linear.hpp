#pragma once

#include <span>
#include <string>
#include <vector>

#include "reef/dataset.hpp"
#include "reef/linalg.hpp"

namespace reef {

/// y = intercept + weights · x
struct LinearModel {
  double intercept = 0.0;
  Vector weights;
  std::vector<std::string> feature_names;

  double predict(std::span<const double> features) const;
};

struct RidgeConfig {
  double lambda = 1.0;
};

/// Diagonal jitter added once when the normal equations are not positive
/// definite.
constexpr double kNormalEquationJitter = 1e-10;

/// Least squares through the normal equations on [1 | X].
LinearModel fit_ols(const ReefDataset& train);

/// Solves (XcᵀXc + λI)w = Xcᵀyc on centered data; the intercept
/// mean(y) − w·mean(x) is not penalized.
LinearModel fit_ridge(const ReefDataset& train, const RidgeConfig& cfg);

double predict_linear(const LinearModel& model, std::span<const double> features);

}  // namespace reef
