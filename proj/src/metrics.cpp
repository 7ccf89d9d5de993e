#include "reef/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "reef/error.hpp"

namespace reef {
namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(who) + ": length mismatch " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw DimensionError(std::string(who) + ": empty input");
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "r2_score");
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("r2_score is undefined for constant y_true (SS_tot = 0)");
  return 1.0 - ss_res / ss_tot;
}

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    s += d * d;
  }
  return s / static_cast<double>(y_true.size());
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) s += std::abs(y_true[i] - y_pred[i]);
  return s / static_cast<double>(y_true.size());
}

EvalReport evaluate_all(const std::vector<NamedPredictor>& models, const ReefDataset& test) {
  if (test.empty()) throw EmptyDatasetError("evaluate_all needs a non-empty test set");
  std::set<std::string> names;
  EvalReport report;
  for (const auto& m : models) {
    if (!names.insert(m.name).second) throw ConfigError("duplicate model name in report: " + m.name);
    std::vector<double> pred(test.size());
    try {
      for (std::size_t i = 0; i < test.size(); ++i) pred[i] = m.predict(test.row(i));
    } catch (const std::exception& e) {
      throw Error("model \"" + m.name + "\" failed to predict: " + e.what());
    }
    const auto y = test.y().span();
    report.rows.push_back({m.name, r2_score(y, pred), mse(y, pred), mae(y, pred)});
  }
  return report;
}

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string render_text(const EvalReport& report) {
  const std::string head = "Algorithm / Metric";
  std::size_t name_w = head.size();
  std::size_t num_w = 3;
  for (const auto& r : report.rows) {
    name_w = std::max(name_w, r.model_name.size());
    for (double v : {r.r2, r.mse, r.mae}) num_w = std::max(num_w, format_metric(v).size());
  }
  std::string out;
  if (!report.split.empty()) out += "Split: " + report.split + "\n";
  out += pad_right(head, name_w) + "  " + pad_left("R2", num_w) + "  " + pad_left("MSE", num_w) +
         "  " + pad_left("MAE", num_w) + "\n";
  for (const auto& r : report.rows) {
    out += pad_right(r.model_name, name_w) + "  " + pad_left(format_metric(r.r2), num_w) + "  " +
           pad_left(format_metric(r.mse), num_w) + "  " + pad_left(format_metric(r.mae), num_w) +
           "\n";
  }
  return out;
}

std::string render_csv(const EvalReport& report) {
  std::string out = "model,r2,mse,mae\n";
  for (const auto& r : report.rows) {
    std::string name = r.model_name;
    if (name.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : name) {
        if (c == '"') q += '"';
        q += c;
      }
      name = q + "\"";
    }
    out += name + "," + format_metric(r.r2) + "," + format_metric(r.mse) + "," +
           format_metric(r.mae) + "\n";
  }
  return out;
}

}  // namespace reef
