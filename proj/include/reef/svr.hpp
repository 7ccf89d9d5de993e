#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "reef/dataset.hpp"
#include "reef/linalg.hpp"

namespace reef {

enum class KernelKind { linear, polynomial, rbf };

/// linear: x·z; polynomial: (gamma·x·z + coef0)^degree; rbf: exp(-gamma‖x−z‖²).
/// An unset gamma is resolved at fit time to 1 / (p · Var(X)) over all
/// training feature values.
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  int degree = 3;
  std::optional<double> gamma;
  double coef0 = 0.0;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct SvrConfig {
  double c = 1.0;
  double epsilon = 0.1;
  KernelSpec kernel;
  double tol = 1e-3;
  std::size_t max_passes = 200;
};

struct SvrModel {
  Matrix support_vectors;
  Vector coefficients;  // β = α − α*, one per support vector
  double bias = 0.0;
  KernelSpec kernel;    // gamma always resolved
  bool converged = false;
  std::size_t iterations = 0;
  double dual_objective = 0.0;

  double predict(std::span<const double> features) const;
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& s);

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> z);

/// 1 / (p · population variance of every feature value); 1 when that
/// variance is zero.
double scale_gamma(const ReefDataset& train);

/// ε-SVR dual  max −½βᵀKβ − εΣ|β| + yᵀβ  s.t. Σβ = 0, |β| ≤ c.
double svr_dual_objective(const Matrix& kernel_matrix, std::span<const double> y,
                          std::span<const double> beta, double epsilon);

/// SMO on the 2n-variable (α, α*) form of the dual, with maximal-violating
/// first index and second-order choice of the partner. Stops when the KKT gap
/// falls below cfg.tol, or after max_passes·2n updates with converged = false.
/// When `objective_trace` is given, the dual objective after every update is
/// appended to it (starting with the value at β = 0).
SvrModel fit_svr(const ReefDataset& train, const SvrConfig& cfg,
                 std::vector<double>* objective_trace = nullptr);

double predict_svr(const SvrModel& model, std::span<const double> features);

}  // namespace reef
