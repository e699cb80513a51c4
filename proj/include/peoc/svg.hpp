#ifndef PEOC_SVG_HPP_
#define PEOC_SVG_HPP_

// Deterministic SVG plots: ROC curves, AUC box plots and training curves.
// Identical inputs always give byte-identical documents.

#include <filesystem>
#include <string>
#include <vector>

#include "peoc/evalx.hpp"
#include "peoc/ppo.hpp"

namespace peoc::svg {

inline constexpr int kCanvasWidth = 640;
inline constexpr int kCanvasHeight = 480;

// Series colors by index.
const std::vector<std::string>& palette();

struct PlotSpec {
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> labels;  // per input; defaults to the file stem
  std::filesystem::path output;
  std::string title;
  std::string x_label;
  std::string y_label;
};

struct RocSeries {
  std::string name;
  evalx::RocCurve curve;
};

struct BoxSeries {
  std::string name;
  std::vector<double> values;
};

// Box geometry in data units. Whiskers reach the most extreme values within
// 1.5 IQR of the box; anything beyond is an outlier.
struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxStats box_stats(const std::vector<double>& values);

std::string roc_svg(const std::vector<RocSeries>& series, const PlotSpec& spec);
std::string box_svg(const std::vector<BoxSeries>& series, const PlotSpec& spec);
std::string training_svg(const ppo::TrainingCurve& curve, const PlotSpec& spec);

// File-level emitters: read the CSV inputs named in `spec` and write
// spec.output. Throw ParseError on malformed CSV.
void emit_roc_svg(const PlotSpec& spec);       // inputs: threshold,fpr,tpr files
void emit_box_svg(const PlotSpec& spec);       // inputs[0]: repeat,classifier,auc
void emit_training_svg(const PlotSpec& spec);  // inputs[0]: training curve CSV

std::string xml_escape(std::string_view text);

}  // namespace peoc::svg

#endif  // PEOC_SVG_HPP_
