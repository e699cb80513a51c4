#include "peoc/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "peoc/csv.hpp"

namespace peoc::evalx {

std::size_t train_size(std::size_t n, SplitRatio ratio) {
  const std::size_t total = static_cast<std::size_t>(ratio.train_parts + ratio.test_parts);
  return (2 * n * static_cast<std::size_t>(ratio.train_parts) + total) / (2 * total);
}

RocCurve roc_curve(std::span<const ScoredSample> samples) {
  RocCurve curve;
  for (const ScoredSample& s : samples) {
    (s.label == Label::kOod ? curve.positives : curve.negatives) += 1;
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw SingleClassInput("ROC needs both IND and OOD samples (got " +
                           std::to_string(curve.negatives) + " IND, " +
                           std::to_string(curve.positives) + " OOD)");
  }

  std::vector<std::pair<double, Label>> sorted;
  sorted.reserve(samples.size());
  for (const ScoredSample& s : samples) sorted.emplace_back(s.score, s.label);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double p = static_cast<double>(curve.positives);
  const double n = static_cast<double>(curve.negatives);
  curve.points.push_back({0.0, 0.0});
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].first;
    // Samples sharing a score flip class together.
    for (; i < sorted.size() && sorted[i].first == threshold; ++i) {
      (sorted[i].second == Label::kOod ? tp : fp) += 1;
    }
    curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    curve.thresholds.push_back(threshold);
  }
  curve.auc = auc(curve);
  return curve;
}

double auc(const RocCurve& curve) {
  if (curve.positives == 0 || curve.negatives == 0) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      const RocPoint& a = curve.points[i - 1];
      const RocPoint& b = curve.points[i];
      area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
  }
  // Trapezoids over the integer counts behind each vertex, so the sum is
  // exact and a perfect curve gives exactly 1.
  const double p = static_cast<double>(curve.positives);
  const double n = static_cast<double>(curve.negatives);
  std::uint64_t twice_area = 0;
  std::uint64_t fp_prev = 0, tp_prev = 0;
  for (const RocPoint& pt : curve.points) {
    const auto fp = static_cast<std::uint64_t>(std::llround(pt.fpr * n));
    const auto tp = static_cast<std::uint64_t>(std::llround(pt.tpr * p));
    twice_area += (fp - fp_prev) * (tp + tp_prev);
    fp_prev = fp;
    tp_prev = tp;
  }
  return static_cast<double>(twice_area) / (2.0 * p * n);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyInput("quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

ClassifierStats summarize(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("no values to summarize");
  std::vector<double> v(values.begin(), values.end());
  ClassifierStats s;
  s.n = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.stddev_defined = true;
  }
  s.median = quantile(v, 0.5);
  s.q1 = quantile(v, 0.25);
  s.q3 = quantile(v, 0.75);
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

AggregateStats aggregate(const std::map<std::string, std::vector<double>>& auc_by_classifier) {
  if (auc_by_classifier.empty()) throw EmptyInput("no classifiers to aggregate");
  AggregateStats out;
  for (const auto& [name, values] : auc_by_classifier) {
    if (values.empty()) throw EmptyInput("classifier " + name + " has no repeats");
    out[name] = summarize(values);
  }
  return out;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream os;
  os << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    os << csv::format_double(curve.thresholds[i]) << ','
       << csv::format_double(curve.points[i].fpr) << ','
       << csv::format_double(curve.points[i].tpr) << '\n';
  }
  return os.str();
}

RocCurve roc_from_csv(std::string_view text) {
  const csv::Table table = csv::parse(text, {"threshold", "fpr", "tpr"});
  RocCurve curve;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    curve.thresholds.push_back(csv::parse_double(row[0], line));
    curve.points.push_back({csv::parse_double(row[1], line), csv::parse_double(row[2], line)});
  }
  if (curve.points.size() < 2) throw ParseError(1, "ROC curve needs at least two points");
  curve.auc = auc(curve);
  return curve;
}

std::string auc_table_to_csv(std::span<const AucRow> rows) {
  std::ostringstream os;
  os << "repeat,classifier,auc\n";
  for (const AucRow& r : rows) {
    os << r.repeat << ',' << r.classifier << ',' << csv::format_double(r.auc) << '\n';
  }
  return os.str();
}

std::vector<AucRow> auc_table_from_csv(std::string_view text) {
  const csv::Table table = csv::parse(text, {"repeat", "classifier", "auc"});
  std::vector<AucRow> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    if (row[1].empty()) throw ParseError(line, "empty classifier name");
    rows.push_back({static_cast<int>(csv::parse_int(row[0], line)), row[1],
                    csv::parse_double(row[2], line)});
  }
  return rows;
}

std::vector<std::string> classifier_order(std::span<const AucRow> rows) {
  std::vector<std::string> order;
  for (const AucRow& r : rows) {
    if (std::find(order.begin(), order.end(), r.classifier) == order.end()) {
      order.push_back(r.classifier);
    }
  }
  return order;
}

std::string aggregate_to_csv(const AggregateStats& stats,
                             const std::vector<std::string>& order) {
  std::ostringstream os;
  os << "classifier,n,median,mean,std,std_defined,min,q1,q3,max\n";
  for (const std::string& name : order) {
    const auto it = stats.find(name);
    if (it == stats.end()) continue;
    const ClassifierStats& s = it->second;
    os << name << ',' << s.n << ',' << csv::format_double(s.median) << ','
       << csv::format_double(s.mean) << ',' << csv::format_double(s.stddev) << ','
       << (s.stddev_defined ? 1 : 0) << ',' << csv::format_double(s.min) << ','
       << csv::format_double(s.q1) << ',' << csv::format_double(s.q3) << ','
       << csv::format_double(s.max) << '\n';
  }
  return os.str();
}

}  // namespace peoc::evalx
