#include "reef/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>

#include "reef/error.hpp"
#include "reef/rng.hpp"

namespace reef {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_binary(std::string_view s) {
  const std::string v = lower(trim(s));
  if (v == "day" || v == "true") return 1.0;
  if (v == "night" || v == "false") return 0.0;
  if (auto num = parse_number(v); num && (*num == 0.0 || *num == 1.0)) return num;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::optional<double> parse_cell(std::string_view cell, ColumnKind kind) {
  return kind == ColumnKind::feature_binary ? parse_binary(cell) : parse_number(cell);
}

SchemaConfig::SchemaConfig(std::vector<ColumnSchema> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  std::size_t targets = 0;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column name: " + c.name);
    if (c.kind == ColumnKind::target) ++targets;
  }
  if (targets != 1) {
    throw SchemaError("schema must have exactly one target column, found " +
                      std::to_string(targets));
  }
}

SchemaConfig SchemaConfig::reef_default() {
  using K = ColumnKind;
  return SchemaConfig({
      {"Tank Total Alkalinity", K::feature_numeric},
      {"Tank Temperature", K::feature_numeric},
      {"Tank pH", K::feature_numeric},
      {"Tank Phosphate", K::feature_numeric},
      {"Nitrate", K::feature_numeric},
      {"Silicate", K::feature_numeric},
      {"Tank CO2", K::feature_numeric},
      {"Tank HCO3", K::feature_numeric},
      {"Tank CO3", K::feature_numeric},
      {"Tank Dissolved Inorganic Carbon", K::feature_numeric},
      {"Tank Aragonite Saturation State", K::feature_numeric},
      {"Tank Calcite Saturation State", K::feature_numeric},
      {"Residence Time", K::feature_numeric},
      {"Flow Rate", K::feature_numeric},
      {"Surface Area", K::feature_numeric},
      {"Ash Free Dry Weight", K::feature_numeric},
      {"Day/Night", K::feature_binary},
      {"Respiration", K::feature_numeric},
      {"Gross Community Production Rate", K::target},
      {"Tank pCO2", K::dropped},
      {"Tank fCO2", K::dropped},
      {"Net Community Calcification Rate", K::dropped},
      {"Gross Community Calcification Rate", K::dropped},
      {"Net Community Production Rate", K::dropped},
      {"Dry Weight", K::dropped},
  });
}

std::vector<ColumnSchema> SchemaConfig::features() const {
  std::vector<ColumnSchema> out;
  for (const auto& c : columns_) {
    if (c.kind == ColumnKind::feature_numeric || c.kind == ColumnKind::feature_binary) {
      out.push_back(c);
    }
  }
  return out;
}

const std::string& SchemaConfig::target() const {
  for (const auto& c : columns_)
    if (c.kind == ColumnKind::target) return c.name;
  throw SchemaError("schema has no target column");
}

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::feature_numeric: return "feature_numeric";
    case ColumnKind::feature_binary: return "feature_binary";
    case ColumnKind::target: return "target";
    case ColumnKind::dropped: return "dropped";
  }
  return "unknown";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "feature_numeric") return ColumnKind::feature_numeric;
  if (s == "feature_binary") return ColumnKind::feature_binary;
  if (s == "target") return ColumnKind::target;
  if (s == "dropped") return ColumnKind::dropped;
  throw SchemaError("unknown column kind: " + s);
}

nlohmann::json schema_to_json(const SchemaConfig& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns()) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
  return {{"columns", cols}};
}

SchemaConfig schema_from_json(const nlohmann::json& j) {
  if (!j.contains("columns") || !j.at("columns").is_array()) {
    throw SchemaError("schema config needs a \"columns\" array");
  }
  std::vector<ColumnSchema> cols;
  for (const auto& c : j.at("columns")) {
    cols.push_back({c.at("name").get<std::string>(),
                    column_kind_from_string(c.at("kind").get<std::string>())});
  }
  return SchemaConfig(std::move(cols));
}

ReefDataset::ReefDataset(std::vector<ColumnSchema> features, std::string target_name, Matrix x,
                         Vector y)
    : features_(std::move(features)),
      target_name_(std::move(target_name)),
      x_(std::move(x)),
      y_(std::move(y)) {
  if (x_.rows() != y_.size()) {
    throw DimensionError("dataset has " + std::to_string(x_.rows()) + " feature rows but " +
                         std::to_string(y_.size()) + " targets");
  }
  if (x_.cols() != features_.size() && !(x_.rows() == 0 && x_.cols() == 0)) {
    throw DimensionError("dataset row width " + std::to_string(x_.cols()) + " does not match " +
                         std::to_string(features_.size()) + " feature names");
  }
}

std::vector<std::string> ReefDataset::feature_names() const {
  std::vector<std::string> names;
  for (const auto& f : features_) names.push_back(f.name);
  return names;
}

ReefDataset ReefDataset::subset(std::span<const std::size_t> indices) const {
  const std::size_t p = feature_count();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(indices.size() * p);
  ys.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw DimensionError("row index " + std::to_string(i) + " out of range");
    const auto r = row(i);
    xs.insert(xs.end(), r.begin(), r.end());
    ys.push_back(y_[i]);
  }
  return ReefDataset(features_, target_name_, Matrix(indices.size(), p, std::move(xs)),
                     Vector(std::move(ys)));
}

ReefDataset ReefDataset::with_features(Matrix x) const {
  return ReefDataset(features_, target_name_, std::move(x), y_);
}

IngestResult ingest_csv(const std::filesystem::path& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open data file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("data file " + path.string() + " has no header row");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  const auto features = schema.features();
  std::vector<std::size_t> feature_pos;
  std::vector<std::string> missing;
  auto locate = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      missing.push_back(name);
      return 0;
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  for (const auto& f : features) feature_pos.push_back(locate(f.name));
  const std::size_t target_pos = locate(schema.target());
  if (!missing.empty()) {
    std::string msg = "data file " + path.string() + " is missing schema columns:";
    for (const auto& m : missing) msg += " \"" + m + "\"";
    throw SchemaError(msg);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t removed = 0;
  std::vector<double> row(features.size());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      ++removed;
      continue;
    }
    bool ok = true;
    for (std::size_t j = 0; j < features.size() && ok; ++j) {
      const auto v = parse_cell(fields[feature_pos[j]], features[j].kind);
      if (v) row[j] = *v; else ok = false;
    }
    const auto t = parse_number(fields[target_pos]);
    if (!ok || !t) {
      ++removed;
      continue;
    }
    xs.insert(xs.end(), row.begin(), row.end());
    ys.push_back(*t);
  }
  if (ys.empty()) {
    throw EmptyDatasetError("data file " + path.string() + " has no usable rows (" +
                            std::to_string(removed) + " removed)");
  }
  const std::size_t n = ys.size();
  return {ReefDataset(features, schema.target(), Matrix(n, features.size(), std::move(xs)),
                      Vector(std::move(ys))),
          removed};
}

void export_csv(const ReefDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& f : data.features()) out << quote_csv(f.name) << ',';
  out << quote_csv(data.target_name()) << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << format_double(v) << ',';
    out << format_double(data.target(i)) << '\n';
  }
}

std::size_t train_size(std::size_t n, double train_fraction) {
  // Guard the product against representation error (505 * 0.6 must give 303).
  const double exact = static_cast<double>(n) * train_fraction;
  const double rounded = std::round(exact);
  const double v = std::abs(exact - rounded) < 1e-9 ? rounded : std::floor(exact);
  return std::min(n, static_cast<std::size_t>(v));
}

TrainTestSplit split(const ReefDataset& data, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1], got " + std::to_string(cfg.train_fraction));
  }
  if (data.empty()) throw EmptyDatasetError("cannot split an empty dataset");
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(cfg.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t cut = train_size(n, cfg.train_fraction);
  const std::span<const std::size_t> all(order);
  return {data.subset(all.first(cut)), data.subset(all.subspan(cut))};
}

Standardizer fit_standardizer(const ReefDataset& train) {
  if (train.empty()) throw EmptyDatasetError("cannot fit a standardizer on an empty dataset");
  const std::size_t n = train.size(), p = train.feature_count();
  Standardizer s{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += train.x()(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = train.x()(i, j) - mean;
      ss += d * d;
    }
    s.mean[j] = mean;
    s.std[j] = std::sqrt(ss / static_cast<double>(n));
  }
  return s;
}

std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> row) {
  if (row.size() != s.mean.size()) {
    throw DimensionError("standardizer fitted on " + std::to_string(s.mean.size()) +
                         " features, row has " + std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = s.std[j] < kConstantColumnStd ? 0.0 : (row[j] - s.mean[j]) / s.std[j];
  }
  return out;
}

ReefDataset apply_standardizer(const Standardizer& s, const ReefDataset& data) {
  if (data.feature_count() != s.mean.size()) {
    throw DimensionError("standardizer fitted on " + std::to_string(s.mean.size()) +
                         " features, dataset has " + std::to_string(data.feature_count()));
  }
  std::vector<double> xs;
  xs.reserve(data.size() * data.feature_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = apply_standardizer(s, data.row(i));
    xs.insert(xs.end(), r.begin(), r.end());
  }
  return data.with_features(Matrix(data.size(), data.feature_count(), std::move(xs)));
}

ReefDataset generate_synthetic(std::size_t n, std::size_t p, const Vector& weights,
                               double intercept, double noise_sd, std::uint64_t seed) {
  if (weights.size() != p) {
    throw DimensionError("generate_synthetic: " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(p) + " features");
  }
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
  SplitMix64 rng(seed);
  std::vector<double> xs(n * p);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = intercept;
    for (std::size_t j = 0; j < p; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      xs[i * p + j] = v;
      t += weights[j] * v;
    }
    const double z = rng.normal();
    ys[i] = t + noise_sd * z;
  }
  std::vector<ColumnSchema> features;
  for (std::size_t j = 0; j < p; ++j) features.push_back({"x" + std::to_string(j), ColumnKind::feature_numeric});
  return ReefDataset(std::move(features), "y", Matrix(n, p, std::move(xs)), Vector(std::move(ys)));
}

double noise_sd_for_r2(const Vector& weights, double r2) {
  if (!(r2 > 0.0 && r2 <= 1.0)) throw ConfigError("target R² must lie in (0, 1]");
  const double signal_var = dot(weights.span(), weights.span()) / 3.0;
  return std::sqrt(signal_var * (1.0 - r2) / r2);
}

}  // namespace reef
