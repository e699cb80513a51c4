#include <cstdio>
#include <sstream>

#include "peoc/bench.hpp"
#include "peoc/csv.hpp"
#include "peoc/svg.hpp"

namespace peoc::bench {

namespace fs = std::filesystem;

namespace {

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string status_name(RepeatStatus s) {
  return s == RepeatStatus::kAccepted ? "ACCEPTED" : "DISCARDED";
}

void write_repeat_table(std::ostringstream& os, std::span<const RepeatReport> repeats) {
  os << pad("repeat", 8) << pad("status", 11) << pad("ret_last", 10) << pad("H_first", 9)
     << pad("H_last", 9) << pad("I_train", 9) << pad("I_test", 8) << pad("O", 8);
  for (const auto& name : classifier_roster()) os << pad(name, 11);
  os << '\n';
  for (const RepeatReport& r : repeats) {
    os << pad(std::to_string(r.repeat), 8) << pad(status_name(r.status), 11)
       << pad(f4(r.final_window_return), 10) << pad(f4(r.first_window_entropy), 9)
       << pad(f4(r.final_window_entropy), 9) << pad(std::to_string(r.n_ind_train), 9)
       << pad(std::to_string(r.n_ind_test), 8) << pad(std::to_string(r.n_ood), 8);
    for (const ClassifierResult& c : r.classifiers) os << pad(f4(c.roc.auc), 11);
    os << '\n';
    if (!r.diagnostic.empty()) os << "        " << r.diagnostic << '\n';
  }
}

}  // namespace

void write_repeat_outputs(const fs::path& dir, const RepeatReport& r) {
  for (const char* sub : {"roc", "curves", "snapshots", "plots"}) fs::create_directories(dir / sub);
  const std::string id = std::to_string(r.repeat);
  csv::write_file(dir / "curves" / (id + "_training.csv"), ppo::curve_to_csv(r.curve));
  if (r.first_snapshot) save_snapshot(dir / "snapshots" / (id + "_first.bin"), *r.first_snapshot);
  if (r.last_snapshot) save_snapshot(dir / "snapshots" / (id + "_last.bin"), *r.last_snapshot);

  svg::PlotSpec training_spec;
  training_spec.title = "Repeat " + id + " training";
  csv::write_file(dir / "plots" / ("training_" + id + ".svg"), svg::training_svg(r.curve, training_spec));

  if (r.status != RepeatStatus::kAccepted) return;
  std::vector<svg::RocSeries> series;
  for (const ClassifierResult& c : r.classifiers) {
    csv::write_file(dir / "roc" / (id + "_" + c.name + ".csv"), evalx::roc_to_csv(c.roc));
    series.push_back({c.name, c.roc});
  }
  svg::PlotSpec roc_spec;
  roc_spec.title = "Repeat " + id + " ROC";
  csv::write_file(dir / "plots" / ("roc_" + id + ".svg"), svg::roc_svg(series, roc_spec));
}

void write_outputs(const fs::path& dir, const BenchmarkReport& report) {
  fs::create_directories(dir);
  for (const RepeatReport& r : report.repeats) write_repeat_outputs(dir, r);

  const auto rows = auc_rows(report.repeats);
  csv::write_file(dir / "report.csv", evalx::auc_table_to_csv(rows));
  csv::write_file(dir / "aggregate.csv",
                  evalx::aggregate_to_csv(report.aggregate, evalx::classifier_order(rows)));
  csv::write_file(dir / "report.txt", summary_text(report));

  std::vector<svg::BoxSeries> boxes;
  for (const std::string& name : evalx::classifier_order(rows)) {
    svg::BoxSeries s{name, {}};
    for (const auto& row : rows) {
      if (row.classifier == name) s.values.push_back(row.auc);
    }
    boxes.push_back(std::move(s));
  }
  svg::PlotSpec box_spec;
  box_spec.title = "ROC AUC over " + std::to_string(report.accepted) + " accepted repeats";
  csv::write_file(dir / "plots" / "box.svg", svg::box_svg(boxes, box_spec));
}

std::string summary_text(const BenchmarkReport& report) {
  std::ostringstream os;
  const BenchConfig& c = report.config;
  os << "PEOC benchmark report\n\n";
  os << "configuration:\n" << write_config(c) << '\n';
  os << "updates per repeat: " << c.updates() << " (PEOC-last is the snapshot after update "
     << c.updates() << ")\n";
  os << "repeats: " << report.repeats.size() << ", accepted " << report.accepted
     << ", discarded " << report.discarded << "\n\n";
  write_repeat_table(os, report.repeats);

  os << "\nROC AUC over accepted repeats:\n";
  os << pad("classifier", 12) << pad("n", 4) << pad("median", 9) << pad("mean", 9)
     << pad("std", 9) << pad("min", 9) << pad("q1", 9) << pad("q3", 9) << "max\n";
  const auto order = evalx::classifier_order(auc_rows(report.repeats));
  for (const std::string& name : order) {
    const evalx::ClassifierStats& s = report.aggregate.at(name);
    os << pad(name, 12) << pad(std::to_string(s.n), 4) << pad(f4(s.median), 9)
       << pad(f4(s.mean), 9) << pad(s.stddev_defined ? f4(s.stddev) : "n/a", 9)
       << pad(f4(s.min), 9) << pad(f4(s.q1), 9) << pad(f4(s.q3), 9) << f4(s.max) << '\n';
  }

  os << "\ndirectional checks:\n";
  bool entropy_ok = true;
  for (const RepeatReport& r : report.repeats) {
    if (r.status == RepeatStatus::kAccepted && !(r.final_window_entropy < r.first_window_entropy)) {
      entropy_ok = false;
    }
  }
  os << "  entropy decreases over training in every accepted repeat: "
     << (entropy_ok ? "PASS" : "FAIL") << '\n';
  const auto first = report.aggregate.find("PEOC-1");
  const auto last = report.aggregate.find("PEOC-last");
  if (first != report.aggregate.end() && last != report.aggregate.end()) {
    const double m1 = first->second.median;
    const double ml = last->second.median;
    os << "  PEOC-1 median AUC >= 0.6: " << (m1 >= 0.6 ? "PASS" : "FAIL") << " (" << f4(m1)
       << ")\n";
    os << "  PEOC-1 median AUC >= PEOC-last median AUC: " << (m1 >= ml ? "PASS" : "FAIL")
       << " (" << f4(m1) << " vs " << f4(ml) << ")\n";
  }
  return os.str();
}

std::string failure_text(const BenchConfig& config, std::span<const RepeatReport> repeats,
                         const std::string& reason) {
  std::ostringstream os;
  os << "PEOC benchmark report\n\n";
  os << "configuration:\n" << write_config(config) << '\n';
  os << "benchmark failed: " << reason << "\n\n";
  write_repeat_table(os, repeats);
  return os.str();
}

}  // namespace peoc::bench
