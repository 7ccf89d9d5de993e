#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reef/linalg.hpp"

namespace reef {

enum class ColumnKind { feature_numeric, feature_binary, target, dropped };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::feature_numeric;

  friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

/// Column roles for ingestion. Exactly one target, unique names. Feature
/// order in the ingested dataset follows the order listed here, not the CSV.
class SchemaConfig {
 public:
  SchemaConfig() = default;
  explicit SchemaConfig(std::vector<ColumnSchema> columns);

  /// 18 retained tank-chemistry features, Day/Night binary, target
  /// "Gross Community Production Rate", calculation-based columns dropped.
  static SchemaConfig reef_default();

  const std::vector<ColumnSchema>& columns() const { return columns_; }
  std::vector<ColumnSchema> features() const;
  const std::string& target() const;

 private:
  std::vector<ColumnSchema> columns_;
};

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);
nlohmann::json schema_to_json(const SchemaConfig& schema);
SchemaConfig schema_from_json(const nlohmann::json& j);

/// Feature matrix plus target vector with named columns. Immutable.
class ReefDataset {
 public:
  ReefDataset() = default;
  ReefDataset(std::vector<ColumnSchema> features, std::string target_name, Matrix x, Vector y);

  std::size_t size() const { return y_.size(); }
  bool empty() const { return y_.empty(); }
  std::size_t feature_count() const { return features_.size(); }
  const std::vector<ColumnSchema>& features() const { return features_; }
  std::vector<std::string> feature_names() const;
  const std::string& target_name() const { return target_name_; }
  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  std::span<const double> row(std::size_t i) const { return x_.row(i); }
  double target(std::size_t i) const { return y_[i]; }

  ReefDataset subset(std::span<const std::size_t> indices) const;
  ReefDataset with_features(Matrix x) const;

 private:
  std::vector<ColumnSchema> features_;
  std::string target_name_;
  Matrix x_;
  Vector y_;
};

/// Splits one CSV record; double quotes delimit fields and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses one cell for a column of the given kind; nullopt when missing or
/// unparseable.
std::optional<double> parse_cell(std::string_view cell, ColumnKind kind);

struct IngestResult {
  ReefDataset data;
  std::size_t rows_removed = 0;
};

/// Reads a comma-separated file whose first row names the columns. Rows with
/// a missing or unparseable value in any retained column are dropped and
/// counted. Binary columns accept Day/Night (case-insensitive), true/false,
/// or 1/0.
IngestResult ingest_csv(const std::filesystem::path& path, const SchemaConfig& schema);

/// Writes features then target, shortest round-trip decimal form.
void export_csv(const ReefDataset& data, const std::filesystem::path& path);

struct SplitConfig {
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  ReefDataset train;
  ReefDataset test;
};

/// Seeded Fisher-Yates shuffle then prefix split; train size is
/// floor(n * train_fraction).
TrainTestSplit split(const ReefDataset& data, const SplitConfig& cfg);
std::size_t train_size(std::size_t n, double train_fraction);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;  // population
};

constexpr double kConstantColumnStd = 1e-12;

Standardizer fit_standardizer(const ReefDataset& train);
ReefDataset apply_standardizer(const Standardizer& s, const ReefDataset& data);
std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> row);

/// Features i.i.d. uniform[-1, 1]; target = intercept + w·x + N(0, noise_sd²).
/// Draw order per row: p uniforms, then one normal (two uniforms).
ReefDataset generate_synthetic(std::size_t n, std::size_t p, const Vector& weights,
                               double intercept, double noise_sd, std::uint64_t seed);

/// noise_sd giving R² = Var(signal) / (Var(signal) + noise_sd²) for uniform[-1,1]
/// features, where Var(signal) = ‖w‖² / 3.
double noise_sd_for_r2(const Vector& weights, double r2);

}  // namespace reef
