#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "reef/ensemble.hpp"
#include "reef/error.hpp"
#include "reef/metrics.hpp"
#include "reef/rng.hpp"

using namespace reef;

namespace {

TrainedModel constant(const std::string& name, double c, std::size_t p = 2) {
  return {name, LinearModel{c, Vector(p, 0.0), {}}};
}

std::vector<double> predictions(const auto& model, const ReefDataset& d) {
  std::vector<double> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(model.predict(d.row(i)));
  return out;
}

}  // namespace

TEST_CASE("ensemble of one is its member") {
  const auto d = generate_synthetic(50, 3, Vector{1, 2, 3}, 1, 0.5, 1);
  const auto ens = fit_ensemble(d, {{"Ridge", RidgeConfig{0.5}}}, false, 0);
  const auto m = fit_model({"Ridge", RidgeConfig{0.5}}, d);
  CHECK(predictions(ens, d) == predictions(m, d));
}

TEST_CASE("mean aggregation") {
  const EnsembleModel two({constant("a", 1.0), constant("b", 4.0)});
  CHECK(predict_ensemble(two, std::vector<double>{9, 9}) == 2.5);
  const EnsembleModel three({constant("a", 1.0), constant("b", 2.0), constant("c", 3.0)});
  CHECK(three.predict(std::vector<double>{0, 0}) == 2.0);
  const EnsembleModel same({constant("a", 0.1), constant("b", 0.1), constant("c", 0.1)});
  CHECK(same.predict(std::vector<double>{0, 0}) == 0.1);
  CHECK_THROWS_AS(EnsembleModel({}), ConfigError);
  CHECK_THROWS_AS(EnsembleModel({constant("a", 1.0, 2), constant("b", 1.0, 3)}), DimensionError);
}

TEST_CASE("Jensen bound and order invariance on the full roster") {
  const auto train = generate_synthetic(150, 6, Vector{3, -2, 1, 2, -1, 0.5}, 2, 1.5, 21);
  const auto test = generate_synthetic(100, 6, Vector{3, -2, 1, 2, -1, 0.5}, 2, 1.5, 22);
  auto roster = default_roster(5);
  std::get<ForestConfig>(roster[5].params).n_trees = 20;
  const auto ens = fit_ensemble(train, roster, false, 0);
  REQUIRE(ens.members.size() == 7);

  double member_mean = 0.0;
  for (const auto& m : ens.members) member_mean += mse(test.y().span(), predictions(m, test));
  member_mean /= 7.0;
  const double ens_mse = mse(test.y().span(), predictions(ens, test));
  CHECK(ens_mse <= member_mean + 1e-9);

  std::vector<TrainedModel> shuffled = ens.members;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
  const EnsembleModel permuted(shuffled);
  const auto a = predictions(ens, test), b = predictions(permuted, test);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("Jensen bound holds for arbitrary member predictions") {
  SplitMix64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 1 + rng.below(7);
    std::vector<TrainedModel> members;
    for (std::size_t i = 0; i < k; ++i) members.push_back(constant("m" + std::to_string(i), rng.normal() * 10));
    const EnsembleModel ens(members);
    const auto d = generate_synthetic(20, 2, Vector{1, 1}, rng.normal(), 1.0, t);
    double mean = 0.0;
    for (const auto& m : members) mean += mse(d.y().span(), predictions(m, d));
    mean /= static_cast<double>(k);
    CHECK(mse(d.y().span(), predictions(ens, d)) <= mean + 1e-9);
  }
}

TEST_CASE("bootstrap members are seeded and independent") {
  const auto d = generate_synthetic(60, 2, Vector{1, -1}, 0, 1.0, 30);
  const std::vector<ModelSpec> specs{{"ols a", OlsConfig{}}, {"ols b", OlsConfig{}}};
  const auto a = fit_ensemble(d, specs, true, 5);
  const auto b = fit_ensemble(d, specs, true, 5);
  CHECK(predictions(a, d) == predictions(b, d));
  const auto& m0 = std::get<LinearModel>(a.members[0].model);
  const auto& m1 = std::get<LinearModel>(a.members[1].model);
  CHECK(m0.weights != m1.weights);
}

TEST_CASE("member fit errors carry the member index") {
  const auto d = generate_synthetic(3, 4, Vector{1, 1, 1, 1}, 0, 0, 1);
  try {
    fit_ensemble(d, {{"Ridge", RidgeConfig{1.0}}, {"Linear Regression", OlsConfig{}}}, false, 0);
    FAIL("expected failure");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("member 1") != std::string::npos);
    CHECK(msg.find("Linear Regression") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_ensemble(d, {}, false, 0), ConfigError);
}

TEST_CASE("default roster order") {
  const auto r = default_roster(0);
  std::vector<std::string> names;
  for (const auto& s : r) names.push_back(s.name);
  CHECK(names == std::vector<std::string>{"Linear Regression", "SVR Linear", "SVR Poly", "SVR RBF",
                                          "Decision Trees", "Random Forests", "Ridge Regression"});
}
