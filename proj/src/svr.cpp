#include "reef/svr.hpp"

#include <cmath>
#include <limits>

#include "reef/error.hpp"

namespace reef {
namespace {

constexpr double kTau = 1e-12;
constexpr double kPruneThreshold = 1e-12;

double resolved_gamma(const KernelSpec& k) {
  if (!k.gamma) throw ConfigError("kernel gamma is unresolved; fit the model first");
  return *k.gamma;
}

void validate(const SvrConfig& cfg) {
  if (!(cfg.c > 0.0)) throw ConfigError("SVR box constraint c must be positive");
  if (!(cfg.epsilon >= 0.0)) throw ConfigError("SVR epsilon must be non-negative");
  if (!(cfg.tol > 0.0)) throw ConfigError("SVR tol must be positive");
  if (cfg.kernel.kind == KernelKind::polynomial && cfg.kernel.degree < 1) {
    throw ConfigError("polynomial kernel degree must be at least 1");
  }
  if (cfg.kernel.gamma && !(*cfg.kernel.gamma > 0.0 && std::isfinite(*cfg.kernel.gamma))) {
    throw ConfigError("kernel gamma must be finite and positive");
  }
}

// Working state of the 2n-variable problem: index t < n is α_t (sign +1),
// t ≥ n is α*_{t−n} (sign −1).
struct SmoState {
  std::size_t n;
  double c;
  const std::vector<double>& k;  // n×n
  std::vector<double> alpha;
  std::vector<double> grad;
  std::vector<double> linear;

  int sign(std::size_t t) const { return t < n ? 1 : -1; }
  std::size_t base(std::size_t t) const { return t < n ? t : t - n; }
  double q(std::size_t s, std::size_t t) const {
    return sign(s) * sign(t) * k[base(s) * n + base(t)];
  }
  bool is_upper(std::size_t t) const { return alpha[t] >= c; }
  bool is_lower(std::size_t t) const { return alpha[t] <= 0.0; }
  bool in_up(std::size_t t) const { return sign(t) > 0 ? !is_upper(t) : !is_lower(t); }
  bool in_low(std::size_t t) const { return sign(t) > 0 ? !is_lower(t) : !is_upper(t); }

  // Minimized objective ½ᾱᵀQᾱ + pᵀᾱ = ½ᾱᵀ(G + p).
  double primal_form() const {
    double f = 0.0;
    for (std::size_t t = 0; t < alpha.size(); ++t) f += alpha[t] * (grad[t] + linear[t]);
    return 0.5 * f;
  }
};

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "polynomial" || s == "poly") return KernelKind::polynomial;
  if (s == "rbf") return KernelKind::rbf;
  throw ConfigError("unknown kernel kind: " + s);
}

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw DimensionError("kernel arguments differ in length: " + std::to_string(x.size()) +
                         " vs " + std::to_string(z.size()));
  }
  switch (k.kind) {
    case KernelKind::linear:
      return dot(x, z);
    case KernelKind::polynomial:
      return std::pow(resolved_gamma(k) * dot(x, z) + k.coef0, k.degree);
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        d2 += d * d;
      }
      return std::exp(-resolved_gamma(k) * d2);
    }
  }
  return 0.0;
}

double scale_gamma(const ReefDataset& train) {
  const auto& v = train.x().data();
  if (v.empty()) return 1.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  if (!(var > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(train.feature_count()) * var);
}

double svr_dual_objective(const Matrix& kernel_matrix, std::span<const double> y,
                          std::span<const double> beta, double epsilon) {
  const std::size_t n = beta.size();
  if (kernel_matrix.rows() != n || kernel_matrix.cols() != n || y.size() != n) {
    throw DimensionError("svr_dual_objective size mismatch");
  }
  double quad = 0.0, abs_sum = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += kernel_matrix(i, j) * beta[j];
    quad += beta[i] * row;
    abs_sum += std::abs(beta[i]);
    lin += y[i] * beta[i];
  }
  return -0.5 * quad - epsilon * abs_sum + lin;
}

double SvrModel::predict(std::span<const double> features) const {
  if (features.size() != support_vectors.cols() && support_vectors.rows() > 0) {
    throw DimensionError("SVR model expects " + std::to_string(support_vectors.cols()) +
                         " features, got " + std::to_string(features.size()));
  }
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.rows(); ++i) {
    f += coefficients[i] * kernel_eval(kernel, support_vectors.row(i), features);
  }
  return f;
}

double predict_svr(const SvrModel& model, std::span<const double> features) {
  return model.predict(features);
}

SvrModel fit_svr(const ReefDataset& train, const SvrConfig& cfg,
                 std::vector<double>* objective_trace) {
  validate(cfg);
  const std::size_t n = train.size();
  if (n < 2) throw EmptyDatasetError("fit_svr needs at least two rows");

  KernelSpec kernel = cfg.kernel;
  if (!kernel.gamma) kernel.gamma = scale_gamma(train);

  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval(kernel, train.row(i), train.row(j));
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }

  const std::size_t l = 2 * n;
  SmoState s{n, cfg.c, k, std::vector<double>(l, 0.0), std::vector<double>(l),
             std::vector<double>(l)};
  for (std::size_t i = 0; i < n; ++i) {
    s.linear[i] = cfg.epsilon - train.target(i);
    s.linear[i + n] = cfg.epsilon + train.target(i);
  }
  s.grad = s.linear;
  if (objective_trace) objective_trace->push_back(-s.primal_form());

  const std::size_t max_iter = cfg.max_passes * l;
  std::size_t iter = 0;
  bool converged = false;
  constexpr double inf = std::numeric_limits<double>::infinity();

  while (true) {
    // First index: maximal violator over I_up.
    double gmax = -inf;
    std::size_t i = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (!s.in_up(t)) continue;
      const double v = -s.sign(t) * s.grad[t];
      if (v > gmax) {
        gmax = v;
        i = t;
      }
    }
    // Partner: largest second-order decrease over I_low.
    double gmin = inf;
    double best = inf;
    std::size_t j = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (!s.in_low(t)) continue;
      const double v = -s.sign(t) * s.grad[t];
      if (v < gmin) gmin = v;
      if (i == l || v >= gmax) continue;
      const double b = gmax - v;
      double a = s.q(i, i) + s.q(t, t) - 2.0 * s.sign(i) * s.sign(t) * s.q(i, t);
      if (a <= 0.0) a = kTau;
      const double score = -(b * b) / a;
      if (score < best) {
        best = score;
        j = t;
      }
    }
    if (i == l || j == l || gmax - gmin < cfg.tol) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;
    ++iter;

    const double c = cfg.c;
    const double old_i = s.alpha[i], old_j = s.alpha[j];
    double& ai = s.alpha[i];
    double& aj = s.alpha[j];
    if (s.sign(i) != s.sign(j)) {
      double quad = s.q(i, i) + s.q(j, j) + 2.0 * s.q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-s.grad[i] - s.grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c) { ai = c; aj = c - diff; }
      } else {
        if (aj > c) { aj = c; ai = c + diff; }
      }
    } else {
      double quad = s.q(i, i) + s.q(j, j) - 2.0 * s.q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (s.grad[i] - s.grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c) {
        if (aj > c) { aj = c; ai = sum - c; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }

    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < l; ++t) s.grad[t] += s.q(t, i) * di + s.q(t, j) * dj;
    if (objective_trace) objective_trace->push_back(-s.primal_form());
  }

  // Bias: mean of y·G over free variables, else midpoint of the feasible range.
  double ub = inf, lb = -inf, free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = s.sign(t) * s.grad[t];
    if (s.is_upper(t)) {
      if (s.sign(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (s.is_lower(t)) {
      if (s.sign(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

  std::vector<double> sv;
  std::vector<double> coef;
  const std::size_t p = train.feature_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = s.alpha[i] - s.alpha[i + n];
    if (std::abs(beta) <= kPruneThreshold) continue;
    const auto r = train.row(i);
    sv.insert(sv.end(), r.begin(), r.end());
    coef.push_back(beta);
  }
  const std::size_t count = coef.size();
  return SvrModel{Matrix(count, p, std::move(sv)),
                  Vector(std::move(coef)),
                  -rho,
                  kernel,
                  converged,
                  iter,
                  -s.primal_form()};
}

}  // namespace reef
