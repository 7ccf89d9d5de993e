#include "reef/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "reef/error.hpp"

namespace reef {
namespace {

constexpr double kPivotFloor = 1e-12;
constexpr double kSymmetryTol = 1e-9;

void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NonFiniteError(std::string(what) + " contains a non-finite element");
    }
  }
}

}  // namespace

Vector::Vector(std::size_t n, double fill) : values_(n, fill) { require_finite(values_, "vector"); }

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "vector");
}

Vector::Vector(std::initializer_list<double> values) : values_(values) {
  require_finite(values_, "vector");
}

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix " + shape() + " given " + std::to_string(data_.size()) +
                         " elements");
  }
  require_finite(data_, "matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return Matrix(n, n, std::move(d));
}

std::string Matrix::shape() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul shape mismatch: " + a.shape() + " times " + b.shape());
  }
  const std::size_t n = a.rows(), m = b.cols(), inner = a.cols();
  std::vector<double> out(n * m, 0.0);
  // i-k-j order; each output element still accumulates over k ascending.
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = out.data() + i * m;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < m; ++j) dst[j] += aik * brow[j];
    }
  }
  return Matrix(n, m, std::move(out));
}

Matrix transpose(const Matrix& a) {
  std::vector<double> out(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j * a.rows() + i] = a(i, j);
  return Matrix(a.cols(), a.rows(), std::move(out));
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw DimensionError("matvec shape mismatch: " + a.shape() + " times vector of length " +
                         std::to_string(x.size()));
  }
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x.span());
  return Vector(std::move(out));
}

double stable_mean(std::span<const double> v) {
  if (v.empty()) throw DimensionError("stable_mean of an empty range");
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) return v[0];
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(v.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot length mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("solve_spd needs a square matrix, got " + a.shape());
  if (b.size() != n) {
    throw DimensionError("solve_spd right-hand side length " + std::to_string(b.size()) +
                         " does not match " + a.shape());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol * scale) {
        throw NotPositiveDefiniteError("solve_spd: matrix is not symmetric at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  // Lower-triangular factor L with a = L·Lᵀ, read from the lower triangle.
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > kPivotFloor)) {
      throw NotPositiveDefiniteError("solve_spd: pivot " + std::to_string(d) + " at column " +
                                     std::to_string(j) +
                                     " is not positive; add diagonal jitter and retry");
    }
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * z[k];
    z[i] = s / l[i * n + i];
  }
  std::vector<double> w(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * w[k];
    w[ii] = s / l[ii * n + ii];
  }
  return Vector(std::move(w));
}

}  // namespace reef
