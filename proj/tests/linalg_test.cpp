#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "reef/error.hpp"
#include "reef/linalg.hpp"

using namespace reef;

TEST_CASE("matmul basics") {
  const Matrix m{{1, 2}, {3, 4}};
  CHECK(matmul(Matrix::identity(2), m) == m);
  CHECK(matmul(m, Matrix{{1}, {1}}) == Matrix{{3}, {7}});
  CHECK_THROWS_AS(matmul(m, Matrix{{1, 2, 3}}), DimensionError);
  try {
    matmul(m, Matrix{{1, 2, 3}});
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("2x2") != std::string::npos);
    CHECK(std::string(e.what()).find("1x3") != std::string::npos);
  }
}

TEST_CASE("matmul matches triple-loop oracle") {
  const auto a = oracle::random_matrix(5, 4, 11);
  const auto b = oracle::random_matrix(4, 3, 12);
  const auto c = matmul(a, b);
  const auto ref = oracle::triple_loop_product(oracle::to_dense(a), oracle::to_dense(b));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(c(i, j) - ref[i][j]) <= 1e-12);
}

TEST_CASE("matmul is associative on random conforming triples") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = oracle::random_matrix(3 + s % 4, 5, 100 + s);
    const auto b = oracle::random_matrix(5, 2 + s % 3, 200 + s);
    const auto c = oracle::random_matrix(2 + s % 3, 4, 300 + s);
    const auto l = matmul(matmul(a, b), c);
    const auto r = matmul(a, matmul(b, c));
    for (std::size_t k = 0; k < l.data().size(); ++k) CHECK(std::abs(l.data()[k] - r.data()[k]) <= 1e-9);
  }
}

TEST_CASE("transpose") {
  CHECK(transpose(Matrix{{7}}) == Matrix{{7}});
  CHECK(transpose(Matrix{{1, 2, 3}}) == Matrix{{1}, {2}, {3}});
  const auto a = oracle::random_matrix(4, 7, 5);
  CHECK(transpose(transpose(a)) == a);
}

TEST_CASE("containers reject non-finite values and bad shapes") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Vector({1.0, nan}), NonFiniteError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::infinity()}), NonFiniteError);
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK(Vector().size() == 0);
}

TEST_CASE("solve_spd small cases") {
  const Vector b{1.5, -2.0, 3.0};
  CHECK(solve_spd(Matrix::identity(3), b) == b);
  const auto w = solve_spd(Matrix{{4, 0}, {0, 9}}, Vector{8, 27});
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("solve_spd rejects indefinite, asymmetric and mis-sized input") {
  CHECK_THROWS_AS(solve_spd(Matrix{{1, 2}, {2, 1}}, Vector{1, 1}), NotPositiveDefiniteError);
  CHECK_THROWS_AS(solve_spd(Matrix{{0, 0}, {0, 1}}, Vector{1, 1}), NotPositiveDefiniteError);
  CHECK_THROWS_AS(solve_spd(Matrix{{2, 1}, {0, 2}}, Vector{1, 1}), NotPositiveDefiniteError);
  CHECK_THROWS_AS(solve_spd(Matrix{{1, 0, 0}}, Vector{1}), DimensionError);
  try {
    solve_spd(Matrix{{1, 2}, {2, 1}}, Vector{1, 1});
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(std::string(e.what()).find("jitter") != std::string::npos);
  }
}

TEST_CASE("solve_spd matches Gauss-Jordan oracle and has small residual") {
  for (std::size_t n = 1; n <= 25; ++n) {
    const auto a = oracle::random_spd(n, 1000 + n);
    const auto rhs = oracle::random_matrix(1, n, 2000 + n);
    const Vector b(std::vector<double>(rhs.data()));
    const auto w = solve_spd(a, b);
    const auto ref = oracle::apply(oracle::gauss_jordan_inverse(oracle::to_dense(a)), b.span());
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    const auto back = matvec(a, w);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(w[i] - ref[i]) <= 1e-8);
      CHECK(std::abs(back[i] - b[i]) <= 1e-8 * (1.0 + bmax));
    }
  }
}

TEST_CASE("stable_mean") {
  CHECK(stable_mean(std::vector<double>{0.1, 0.1, 0.1}) == 0.1);
  CHECK(stable_mean(std::vector<double>{1, 2, 3, 4}) == 2.5);
  CHECK(stable_mean(std::vector<double>{1e16, 1.0, -1e16, 1.0}) == 0.5);
  CHECK_THROWS_AS(stable_mean(std::vector<double>{}), DimensionError);
}
