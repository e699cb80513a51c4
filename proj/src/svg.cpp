#include "peoc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "peoc/csv.hpp"
#include "peoc/errors.hpp"

namespace peoc::svg {

const std::vector<std::string>& palette() {
  static const std::vector<std::string> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return kColors;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const std::string& color(std::size_t i) { return palette()[i % palette().size()]; }

// Maps data coordinates into a pixel rectangle.
struct Frame {
  double left, top, width, height;
  double x_min, x_max, y_min, y_max;

  double px(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }
  double py(double y) const { return top + height - (y - y_min) / (y_max - y_min) * height; }
};

void open_document(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvasWidth << "\" height=\""
     << kCanvasHeight << "\" viewBox=\"0 0 " << kCanvasWidth << ' ' << kCanvasHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kCanvasWidth << "\" height=\"" << kCanvasHeight
     << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text class=\"title\" x=\"" << kCanvasWidth / 2
       << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
       << "</text>\n";
  }
}

void draw_axes(std::ostringstream& os, const Frame& f, const std::string& x_label,
               const std::string& y_label, const std::vector<double>& x_ticks,
               const std::vector<double>& y_ticks) {
  os << "<rect class=\"frame\" x=\"" << fmt(f.left) << "\" y=\"" << fmt(f.top) << "\" width=\""
     << fmt(f.width) << "\" height=\"" << fmt(f.height)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : x_ticks) {
    os << "<text x=\"" << fmt(f.px(t)) << "\" y=\"" << fmt(f.top + f.height + 16)
       << "\" text-anchor=\"middle\">" << xml_escape(fmt(t)) << "</text>\n";
  }
  for (double t : y_ticks) {
    os << "<text x=\"" << fmt(f.left - 6) << "\" y=\"" << fmt(f.py(t) + 4)
       << "\" text-anchor=\"end\">" << xml_escape(fmt(t)) << "</text>\n";
  }
  if (!x_label.empty()) {
    os << "<text class=\"x-label\" x=\"" << fmt(f.left + f.width / 2) << "\" y=\""
       << fmt(f.top + f.height + 36) << "\" text-anchor=\"middle\">" << xml_escape(x_label)
       << "</text>\n";
  }
  if (!y_label.empty()) {
    const double x = f.left - 46;
    const double y = f.top + f.height / 2;
    os << "<text class=\"y-label\" x=\"" << fmt(x) << "\" y=\"" << fmt(y)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << fmt(x) << ' ' << fmt(y)
       << ")\">" << xml_escape(y_label) << "</text>\n";
  }
}

std::string polyline_points(const Frame& f, const std::vector<std::pair<double, double>>& pts) {
  std::string out;
  std::string last;
  for (const auto& [x, y] : pts) {
    std::string p = fmt(f.px(x)) + "," + fmt(f.py(y));
    if (p == last) continue;
    if (!out.empty()) out += ' ';
    out += p;
    last = std::move(p);
  }
  return out;
}

std::vector<double> ticks(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(lo + (hi - lo) * i / n);
  return t;
}

std::string label_for(const PlotSpec& spec, std::size_t i) {
  if (i < spec.labels.size() && !spec.labels[i].empty()) return spec.labels[i];
  return spec.inputs[i].stem().string();
}

}  // namespace

std::string roc_svg(const std::vector<RocSeries>& series, const PlotSpec& spec) {
  std::ostringstream os;
  open_document(os, spec.title);
  const Frame f{70, 50, 370, 370, 0, 1, 0, 1};
  draw_axes(os, f, spec.x_label.empty() ? "false positive rate" : spec.x_label,
            spec.y_label.empty() ? "true positive rate" : spec.y_label, ticks(0, 1, 4),
            ticks(0, 1, 4));
  os << "<line class=\"diagonal\" x1=\"" << fmt(f.px(0)) << "\" y1=\"" << fmt(f.py(0))
     << "\" x2=\"" << fmt(f.px(1)) << "\" y2=\"" << fmt(f.py(1))
     << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const evalx::RocPoint& p : series[i].curve.points) pts.emplace_back(p.fpr, p.tpr);
    os << "<polyline class=\"roc\" data-classifier=\"" << xml_escape(series[i].name)
       << "\" fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\"2\" points=\""
       << polyline_points(f, pts) << "\"/>\n";
  }
  const double lx = f.left + f.width + 20;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = f.top + 10 + 20.0 * static_cast<double>(i);
    os << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
       << color(i) << "\"/>\n"
       << "<text class=\"legend\" x=\"" << fmt(lx + 18) << "\" y=\"" << fmt(ly + 1) << "\">"
       << xml_escape(series[i].name + " (AUC " + fmt3(series[i].curve.auc) + ")")
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

BoxStats box_stats(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("box plot series has no values");
  BoxStats b;
  b.q1 = evalx::quantile(values, 0.25);
  b.median = evalx::quantile(values, 0.5);
  b.q3 = evalx::quantile(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_low = std::min(b.whisker_low, v);
      b.whisker_high = std::max(b.whisker_high, v);
    }
  }
  return b;
}

std::string box_svg(const std::vector<BoxSeries>& series, const PlotSpec& spec) {
  std::ostringstream os;
  open_document(os, spec.title);
  double y_min = 0.0;
  double y_max = 1.0;
  for (const BoxSeries& s : series) {
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  const Frame f{70, 50, 540, 370, 0, static_cast<double>(std::max<std::size_t>(series.size(), 1)),
                y_min, y_max};
  draw_axes(os, f, spec.x_label, spec.y_label.empty() ? "ROC AUC" : spec.y_label, {},
            ticks(y_min, y_max, 4));
  const double slot = f.width / std::max<double>(static_cast<double>(series.size()), 1.0);
  const double half = std::min(slot * 0.3, 40.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const BoxStats b = box_stats(series[i].values);
    const double cx = f.left + slot * (static_cast<double>(i) + 0.5);
    const std::string name = xml_escape(series[i].name);
    const std::string& c = color(i);
    os << "<g class=\"series\" data-classifier=\"" << name << "\">\n";
    os << "<line class=\"whisker\" x1=\"" << fmt(cx) << "\" y1=\"" << fmt(f.py(b.whisker_low))
       << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(f.py(b.q1)) << "\" stroke=\"black\"/>\n";
    os << "<line class=\"whisker\" x1=\"" << fmt(cx) << "\" y1=\"" << fmt(f.py(b.q3))
       << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(f.py(b.whisker_high))
       << "\" stroke=\"black\"/>\n";
    for (double w : {b.whisker_low, b.whisker_high}) {
      os << "<line class=\"whisker-cap\" x1=\"" << fmt(cx - half / 2) << "\" y1=\"" << fmt(f.py(w))
         << "\" x2=\"" << fmt(cx + half / 2) << "\" y2=\"" << fmt(f.py(w))
         << "\" stroke=\"black\"/>\n";
    }
    os << "<rect class=\"box\" x=\"" << fmt(cx - half) << "\" y=\"" << fmt(f.py(b.q3))
       << "\" width=\"" << fmt(2 * half) << "\" height=\"" << fmt(f.py(b.q1) - f.py(b.q3))
       << "\" fill=\"" << c << "\" fill-opacity=\"0.4\" stroke=\"" << c << "\"/>\n";
    os << "<line class=\"median\" data-classifier=\"" << name << "\" data-value=\""
       << csv::format_double(b.median) << "\" x1=\"" << fmt(cx - half) << "\" y1=\""
       << fmt(f.py(b.median)) << "\" x2=\"" << fmt(cx + half) << "\" y2=\"" << fmt(f.py(b.median))
       << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double o : b.outliers) {
      os << "<circle class=\"outlier\" cx=\"" << fmt(cx) << "\" cy=\"" << fmt(f.py(o))
         << "\" r=\"3\" fill=\"none\" stroke=\"" << c << "\"/>\n";
    }
    os << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(f.top + f.height + 16)
       << "\" text-anchor=\"middle\">" << name << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string training_svg(const ppo::TrainingCurve& curve, const PlotSpec& spec) {
  std::ostringstream os;
  open_document(os, spec.title);
  const double last = curve.empty() ? 1.0 : std::max(1.0, static_cast<double>(curve.back().update));
  double r_max = 10.0;
  for (const auto& e : curve) r_max = std::max(r_max, e.mean_return);
  const Frame left{60, 50, 240, 360, 0, last, 0, r_max};
  const Frame right{380, 50, 240, 360, 0, last, 0, std::log(4.0)};
  const std::string x_label = spec.x_label.empty() ? "update" : spec.x_label;
  draw_axes(os, left, x_label, "mean episode return", ticks(0, last, 2), ticks(0, r_max, 4));
  draw_axes(os, right, x_label, "mean policy entropy (nats)", ticks(0, last, 2),
            ticks(0, std::log(4.0), 4));
  std::vector<std::pair<double, double>> ret;
  std::vector<std::pair<double, double>> ent;
  for (const auto& e : curve) {
    ret.emplace_back(e.update, e.mean_return);
    ent.emplace_back(e.update, e.mean_entropy);
  }
  os << "<polyline class=\"return\" fill=\"none\" stroke=\"" << color(0)
     << "\" stroke-width=\"1.5\" points=\"" << polyline_points(left, ret) << "\"/>\n";
  os << "<polyline class=\"entropy\" fill=\"none\" stroke=\"" << color(1)
     << "\" stroke-width=\"1.5\" points=\"" << polyline_points(right, ent) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

void emit_roc_svg(const PlotSpec& spec) {
  if (spec.inputs.empty()) throw EmptyInput("plot roc needs at least one ROC CSV");
  std::vector<RocSeries> series;
  for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
    series.push_back({label_for(spec, i), evalx::roc_from_csv(csv::read_file(spec.inputs[i]))});
  }
  csv::write_file(spec.output, roc_svg(series, spec));
}

void emit_box_svg(const PlotSpec& spec) {
  if (spec.inputs.size() != 1) throw EmptyInput("plot box needs exactly one AUC table");
  const auto rows = evalx::auc_table_from_csv(csv::read_file(spec.inputs[0]));
  std::vector<BoxSeries> series;
  for (const std::string& name : evalx::classifier_order(rows)) {
    BoxSeries s{name, {}};
    for (const auto& r : rows) {
      if (r.classifier == name) s.values.push_back(r.auc);
    }
    series.push_back(std::move(s));
  }
  if (series.empty()) throw EmptyInput("AUC table has no rows");
  csv::write_file(spec.output, box_svg(series, spec));
}

void emit_training_svg(const PlotSpec& spec) {
  if (spec.inputs.size() != 1) throw EmptyInput("plot training needs exactly one curve CSV");
  csv::write_file(spec.output,
                  training_svg(ppo::curve_from_csv(csv::read_file(spec.inputs[0])), spec));
}

}  // namespace peoc::svg
