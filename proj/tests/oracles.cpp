#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "reef/rng.hpp"

namespace oracle {

Dense to_dense(const reef::Matrix& m) {
  Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

Dense triple_loop_product(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), inner = b.size(), m = b.empty() ? 0 : b[0].size();
  Dense c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < inner; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Dense gauss_jordan_inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

std::vector<double> apply(const Dense& a, std::span<const double> x) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

LineFit ols_gradient_descent(const reef::ReefDataset& data, double step, std::size_t iterations) {
  const std::size_t n = data.size(), p = data.feature_count();
  LineFit fit{0.0, std::vector<double>(p, 0.0)};
  std::vector<double> grad(p);
  for (std::size_t it = 0; it < iterations; ++it) {
    double gb = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double pred = fit.intercept;
      for (std::size_t j = 0; j < p; ++j) pred += fit.weights[j] * data.x()(i, j);
      const double r = data.target(i) - pred;
      gb -= r;
      for (std::size_t j = 0; j < p; ++j) grad[j] -= r * data.x()(i, j);
    }
    fit.intercept -= step * gb / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) fit.weights[j] -= step * grad[j] / static_cast<double>(n);
  }
  return fit;
}

namespace {

double sse(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

}  // namespace

std::optional<reef::SplitCandidate> brute_force_split(const reef::ReefDataset& data,
                                                      std::span<const std::size_t> rows,
                                                      const reef::TreeConfig& cfg) {
  if (rows.empty() || rows.size() < cfg.min_samples_split) return std::nullopt;
  std::vector<double> all;
  for (std::size_t r : rows) all.push_back(data.target(r));
  const double parent = sse(all);
  const double tie = reef::kSplitGainTolerance * parent;
  std::optional<reef::SplitCandidate> best;
  double best_gain = tie;
  for (std::size_t f = 0; f < data.feature_count(); ++f) {
    std::vector<double> values;
    for (std::size_t r : rows) values.push_back(data.x()(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double threshold = 0.5 * (values[k] + values[k + 1]);
      if (threshold >= values[k + 1]) threshold = values[k];
      std::vector<double> left, right;
      for (std::size_t r : rows) (data.x()(r, f) <= threshold ? left : right).push_back(data.target(r));
      if (left.size() < cfg.min_samples_leaf || right.size() < cfg.min_samples_leaf) continue;
      const double gain = parent - sse(left) - sse(right);
      if (gain > best_gain + (best ? tie : 0.0)) {
        best = reef::SplitCandidate{f, threshold, gain};
        best_gain = gain;
      }
    }
  }
  return best;
}

double svr_dual(const Dense& k, std::span<const double> y, std::span<const double> beta,
                double epsilon) {
  double v = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) v -= 0.5 * beta[i] * beta[j] * k[i][j];
    v += y[i] * beta[i] - epsilon * std::abs(beta[i]);
  }
  return v;
}

double svr_dual_grid_search(const Dense& k, std::span<const double> y, double epsilon, double c,
                            int coarse_steps) {
  const std::size_t n = y.size();
  const std::size_t free = n - 1;
  std::vector<double> beta(n, 0.0);
  auto value = [&](const std::vector<double>& b) {
    double last = 0.0;
    for (std::size_t i = 0; i < free; ++i) last -= b[i];
    if (std::abs(last) > c) return -std::numeric_limits<double>::infinity();
    std::vector<double> full(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(free));
    full.push_back(last);
    return svr_dual(k, y, full, epsilon);
  };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_beta(n, 0.0);
  const double h = c / coarse_steps;
  std::vector<double> cur(n, 0.0);
  std::function<void(std::size_t)> sweep = [&](std::size_t d) {
    if (d == free) {
      const double v = value(cur);
      if (v > best) {
        best = v;
        best_beta = cur;
      }
      return;
    }
    for (int s = -coarse_steps; s <= coarse_steps; ++s) {
      cur[d] = s * h;
      sweep(d + 1);
    }
  };
  sweep(0);

  std::size_t neighbors = 1;
  for (std::size_t i = 0; i < free; ++i) neighbors *= 3;
  for (double step = h / 2; step > 1e-7 * c; step /= 2) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t code = 0; code < neighbors; ++code) {
        std::vector<double> trial = best_beta;
        std::size_t rest = code;
        bool inside = true;
        for (std::size_t i = 0; i < free; ++i) {
          trial[i] += (static_cast<double>(rest % 3) - 1.0) * step;
          rest /= 3;
          if (std::abs(trial[i]) > c) inside = false;
        }
        if (!inside) continue;
        const double v = value(trial);
        if (v > best + 1e-15) {
          best = v;
          best_beta = trial;
          moved = true;
        }
      }
    }
  }
  return best;
}

reef::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  reef::SplitMix64 rng(seed);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return reef::Matrix(rows, cols, std::move(v));
}

reef::Matrix random_spd(std::size_t n, std::uint64_t seed) {
  const auto a = to_dense(random_matrix(n, n, seed));
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) v[i * n + j] += a[k][i] * a[k][j];
      if (i == j) v[i * n + j] += 1.0;
    }
  return reef::Matrix(n, n, std::move(v));
}

}  // namespace oracle
