#include "reef/linear.hpp"

#include <cmath>

#include "reef/error.hpp"

namespace reef {
namespace {

Matrix add_diagonal(const Matrix& a, double value) {
  std::vector<double> d = a.data();
  for (std::size_t i = 0; i < a.rows(); ++i) d[i * a.cols() + i] += value;
  return Matrix(a.rows(), a.cols(), std::move(d));
}

Vector solve_with_jitter(const Matrix& gram, const Vector& rhs, const char* who) {
  try {
    return solve_spd(gram, rhs);
  } catch (const NotPositiveDefiniteError&) {
  }
  try {
    return solve_spd(add_diagonal(gram, kNormalEquationJitter), rhs);
  } catch (const NotPositiveDefiniteError& e) {
    throw RankDeficientError(std::string(who) +
                             ": normal equations are singular even after 1e-10 diagonal "
                             "jitter; features are collinear or constant (" + e.what() + ")");
  }
}

}  // namespace

double LinearModel::predict(std::span<const double> features) const {
  if (features.size() != weights.size()) {
    throw DimensionError("linear model expects " + std::to_string(weights.size()) +
                         " features, got " + std::to_string(features.size()));
  }
  return intercept + dot(weights.span(), features);
}

double predict_linear(const LinearModel& model, std::span<const double> features) {
  return model.predict(features);
}

LinearModel fit_ols(const ReefDataset& train) {
  const std::size_t n = train.size(), p = train.feature_count();
  if (n < p + 1) {
    throw RankDeficientError("fit_ols needs at least " + std::to_string(p + 1) + " rows for " +
                             std::to_string(p) + " features, got " + std::to_string(n));
  }
  std::vector<double> design;
  design.reserve(n * (p + 1));
  for (std::size_t i = 0; i < n; ++i) {
    design.push_back(1.0);
    const auto r = train.row(i);
    design.insert(design.end(), r.begin(), r.end());
  }
  const Matrix x(n, p + 1, std::move(design));
  const Matrix xt = transpose(x);
  const Vector coef = solve_with_jitter(matmul(xt, x), matvec(xt, train.y()), "fit_ols");
  return {coef[0], Vector(std::vector<double>(coef.begin() + 1, coef.end())),
          train.feature_names()};
}

LinearModel fit_ridge(const ReefDataset& train, const RidgeConfig& cfg) {
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw ConfigError("ridge lambda must be finite and non-negative");
  }
  const std::size_t n = train.size(), p = train.feature_count();
  if (n == 0) throw EmptyDatasetError("fit_ridge needs at least one row");

  std::vector<double> x_mean(p, 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x_mean[j] += train.x()(i, j);
    y_mean += train.target(i);
  }
  for (double& m : x_mean) m /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  std::vector<double> xc(n * p);
  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) xc[i * p + j] = train.x()(i, j) - x_mean[j];
    yc[i] = train.target(i) - y_mean;
  }
  const Matrix x(n, p, std::move(xc));
  const Matrix xt = transpose(x);
  const Matrix gram = add_diagonal(matmul(xt, x), cfg.lambda);
  const Vector w = solve_with_jitter(gram, matvec(xt, Vector(std::move(yc))), "fit_ridge");
  return {y_mean - dot(w.span(), x_mean), w, train.feature_names()};
}

}  // namespace reef
