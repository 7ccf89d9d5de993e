#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "reef/dataset.hpp"
#include "reef/error.hpp"
#include "reef/pipeline.hpp"
#include "test_util.hpp"

using namespace reef;

namespace {

SchemaConfig small_schema() {
  return SchemaConfig({{"Tank pH", ColumnKind::feature_numeric},
                       {"Flow Rate", ColumnKind::feature_numeric},
                       {"Day/Night", ColumnKind::feature_binary},
                       {"Gross Community Production Rate", ColumnKind::target},
                       {"Tank pCO2", ColumnKind::dropped}});
}

ReefDataset column(std::vector<double> values) {
  const std::size_t n = values.size();
  return ReefDataset({{"a", ColumnKind::feature_numeric}}, "y", Matrix(n, 1, values),
                     Vector(std::vector<double>(n, 0.0)));
}

}  // namespace

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(SchemaConfig({{"a", ColumnKind::feature_numeric}}), SchemaError);
  CHECK_THROWS_AS(SchemaConfig({{"a", ColumnKind::target}, {"a", ColumnKind::feature_numeric}}),
                  SchemaError);
  const auto def = SchemaConfig::reef_default();
  CHECK(def.features().size() == 18);
  CHECK(def.target() == "Gross Community Production Rate");
  CHECK(schema_from_json(schema_to_json(def)).columns() == def.columns());
}

TEST_CASE("ingest drops incomplete rows and encodes Day/Night") {
  TempDir dir;
  const auto path = dir.path() / "fixture.csv";
  std::ofstream(path) << "Tank pCO2,Tank pH,Flow Rate,Day/Night,Gross Community Production Rate\n"
                         "400,8.1,1.0,Day,10\n"
                         "410,8.0,1.1,Night,11\n"
                         "420,,1.2,Day,12\n"
                         "430,7.9,1.3,night,13\n"
                         ",7.8,1.4,DAY,14\n"
                         "450,NA,1.5,Day,15\n"
                         "460,7.7,1.6,1,16\n"
                         "470,7.6,1.7,0,17\n"
                         "480,7.5,1.8,Day,18\n"
                         "490,7.4,1.9,Night,19\r\n";
  const auto res = ingest_csv(path, small_schema());
  CHECK(res.rows_removed == 2);
  REQUIRE(res.data.size() == 8);
  CHECK(res.data.feature_count() == 3);
  CHECK(res.data.feature_names() == std::vector<std::string>{"Tank pH", "Flow Rate", "Day/Night"});
  CHECK(res.data.row(0)[2] == 1.0);
  CHECK(res.data.row(1)[2] == 0.0);
  CHECK(res.data.row(2)[2] == 0.0);
  CHECK(res.data.row(3)[2] == 1.0);  // the dropped pCO2 column may be empty
  CHECK(res.data.target(7) == 19.0);
}

TEST_CASE("ingest errors") {
  TempDir dir;
  const auto missing = dir.path() / "missing.csv";
  std::ofstream(missing) << "Tank pH,Gross Community Production Rate\n8,1\n";
  try {
    ingest_csv(missing, small_schema());
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Flow Rate") != std::string::npos);
    CHECK(msg.find("Day/Night") != std::string::npos);
    CHECK(msg.find("Tank pH\"") == std::string::npos);
  }
  const auto empty = dir.path() / "empty.csv";
  std::ofstream(empty) << "Tank pH,Flow Rate,Day/Night,Gross Community Production Rate\n"
                          "x,1,Day,2\n";
  CHECK_THROWS_AS(ingest_csv(empty, small_schema()), EmptyDatasetError);
  CHECK_THROWS_AS(ingest_csv(dir.path() / "nope.csv", small_schema()), SchemaError);
}

TEST_CASE("default schema ingests a complete 505-row file") {
  TempDir dir;
  const auto path = dir.path() / "reef.csv";
  write_reef_csv(make_reef_synthetic(505, 3, 0.91), path);
  const auto res = ingest_csv(path, SchemaConfig::reef_default());
  CHECK(res.data.size() == 505);
  CHECK(res.rows_removed == 0);
  CHECK(res.data.feature_count() == 18);
  CHECK(res.data.target_name() == "Gross Community Production Rate");
}

TEST_CASE("export then ingest round-trips values bit-identically") {
  TempDir dir;
  const auto data = generate_synthetic(40, 3, Vector{1.0 / 3.0, -2.0, 1e-7}, 0.1, 0.7, 9);
  const auto path = dir.path() / "round.csv";
  export_csv(data, path);
  SchemaConfig schema({{"x0", ColumnKind::feature_numeric},
                       {"x1", ColumnKind::feature_numeric},
                       {"x2", ColumnKind::feature_numeric},
                       {"y", ColumnKind::target}});
  const auto back = ingest_csv(path, schema).data;
  CHECK(back.x() == data.x());
  CHECK(back.y() == data.y());
}

TEST_CASE("split sizes and determinism") {
  const auto data = generate_synthetic(505, 2, Vector{1, 2}, 0, 1, 1);
  const auto parts = split(data, {0.6, 42});
  CHECK(parts.train.size() == 303);
  CHECK(parts.test.size() == 202);

  const auto all = split(data, {1.0, 42});
  CHECK(all.train.size() == 505);
  CHECK(all.test.empty());

  const auto again = split(data, {0.6, 42});
  CHECK(again.train.x() == parts.train.x());
  CHECK(again.test.y() == parts.test.y());

  const auto small = generate_synthetic(100, 1, Vector{1}, 0, 0, 2);
  CHECK(split(small, {0.5, 1}).train.y() != split(small, {0.5, 2}).train.y());

  CHECK_THROWS_AS(split(data, {0.0, 1}), ConfigError);
  CHECK_THROWS_AS(split(data, {1.5, 1}), ConfigError);
}

TEST_CASE("split partitions rows exactly (multiset equality)") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t n = 1 + seed * 7;
    const auto data = generate_synthetic(n, 2, Vector{1, -1}, 0, 1, seed);
    const auto parts = split(data, {0.3 + 0.02 * static_cast<double>(seed), seed});
    CHECK(parts.train.size() + parts.test.size() == n);
    auto rows_of = [](const ReefDataset& d) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<double> r(d.row(i).begin(), d.row(i).end());
        r.push_back(d.target(i));
        rows.push_back(r);
      }
      return rows;
    };
    auto original = rows_of(data);
    auto merged = rows_of(parts.train);
    const auto t = rows_of(parts.test);
    merged.insert(merged.end(), t.begin(), t.end());
    std::sort(original.begin(), original.end());
    std::sort(merged.begin(), merged.end());
    CHECK(merged == original);
  }
}

TEST_CASE("train_size floors the product") {
  CHECK(train_size(505, 0.6) == 303);
  CHECK(train_size(10, 0.55) == 5);
  CHECK(train_size(7, 1.0) == 7);
  CHECK(train_size(3, 0.1) == 0);
}

TEST_CASE("standardizer statistics") {
  const auto s = fit_standardizer(column({2, 4, 6}));
  CHECK(s.mean[0] == doctest::Approx(4.0));
  CHECK(s.std[0] == doctest::Approx(1.632993).epsilon(1e-6));

  const auto c = fit_standardizer(column({5, 5, 5}));
  CHECK(c.mean[0] == 5.0);
  CHECK(c.std[0] == 0.0);
  const auto z = apply_standardizer(c, column({5, 5, 5}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(z.row(i)[0] == 0.0);

  const Standardizer manual{{4.0}, {2.0}};
  CHECK(apply_standardizer(manual, column({10})).row(0)[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(apply_standardizer(manual, generate_synthetic(2, 2, Vector{1, 1}, 0, 0, 0)),
                  DimensionError);
}

TEST_CASE("standardized training columns have zero mean and unit std") {
  const auto data = generate_synthetic(200, 4, Vector{1, 2, 3, 4}, 1, 0.5, 77);
  const auto parts = split(data, {0.6, 5});
  const auto s = fit_standardizer(parts.train);
  const auto before = s;
  const auto z = apply_standardizer(s, parts.train);
  apply_standardizer(s, parts.test);
  CHECK(s.mean == before.mean);
  CHECK(s.std == before.std);
  const auto again = fit_standardizer(z);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(again.mean[j]) <= 1e-10);
    CHECK(std::abs(again.std[j] - 1.0) <= 1e-10);
  }
  CHECK(z.y() == parts.train.y());
}

TEST_CASE("generate_synthetic") {
  const Vector w{0.5, -1.5, 2.0};
  const auto d = generate_synthetic(50, 3, w, 2.0, 0.0, 4);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.target(i) == 2.0 + w[0] * d.row(i)[0] + w[1] * d.row(i)[1] + w[2] * d.row(i)[2]);
    for (double v : d.row(i)) CHECK((v >= -1.0 && v < 1.0));
  }
  const auto e = generate_synthetic(50, 3, w, 2.0, 0.0, 4);
  CHECK(e.x() == d.x());
  CHECK(e.y() == d.y());
  CHECK_THROWS_AS(generate_synthetic(5, 2, w, 0, 0, 0), DimensionError);
  CHECK(noise_sd_for_r2(Vector{3.0}, 0.5) == doctest::Approx(std::sqrt(3.0)));
}
