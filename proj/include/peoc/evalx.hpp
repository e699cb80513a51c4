#ifndef PEOC_EVALX_HPP_
#define PEOC_EVALX_HPP_

// Binary classifier evaluation with OOD as the positive class.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "peoc/errors.hpp"
#include "peoc/rng.hpp"

namespace peoc::evalx {

enum class Label : std::uint8_t { kInd, kOod };
enum class Source : std::uint8_t { kIndRun, kOodRun };

struct ScoredSample {
  double score = 0.0;
  Label label = Label::kInd;
  Source source = Source::kIndRun;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

// points[0] = (0,0) at threshold +inf; points[i] for i > 0 classifies every
// sample with score >= thresholds[i] as OOD. Thresholds descend strictly.
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> thresholds;
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct SplitRatio {
  int train_parts = 2;
  int test_parts = 1;
};

// round(n * train / (train + test)), halves rounded up.
std::size_t train_size(std::size_t n, SplitRatio ratio);

// Seeded uniform shuffle, then the first train_size(n) items form the train
// part. Throws EmptyInput and RangeError.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> train_test_split(std::vector<T> samples,
                                                           SplitRatio ratio,
                                                           std::uint64_t seed) {
  if (samples.empty()) throw EmptyInput("cannot split an empty sample list");
  if (ratio.train_parts <= 0 || ratio.test_parts <= 0) {
    throw RangeError("split parts must be positive");
  }
  SplitMix64 rng(seed);
  shuffle(samples.begin(), samples.end(), rng);
  const std::size_t n_train = train_size(samples.size(), ratio);
  std::vector<T> test(std::make_move_iterator(samples.begin() + n_train),
                      std::make_move_iterator(samples.end()));
  samples.resize(n_train);
  return {std::move(samples), std::move(test)};
}

// One vertex per distinct score. Throws SingleClassInput.
RocCurve roc_curve(std::span<const ScoredSample> samples);

// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

struct ClassifierStats {
  std::size_t n = 0;
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // n-1 denominator; 0 when n == 1
  bool stddev_defined = false;
  double min = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

using AggregateStats = std::map<std::string, ClassifierStats>;

// Linear interpolation between order statistics; q = 0.5 is the midpoint
// of the two central values for even counts.
double quantile(std::vector<double> values, double q);

ClassifierStats summarize(std::span<const double> values);

// Throws EmptyInput if the map or any classifier's list is empty.
AggregateStats aggregate(const std::map<std::string, std::vector<double>>& auc_by_classifier);

// CSV: threshold,fpr,tpr
std::string roc_to_csv(const RocCurve& curve);
RocCurve roc_from_csv(std::string_view text);

struct AucRow {
  int repeat = 0;
  std::string classifier;
  double auc = 0.0;
};

// CSV: repeat,classifier,auc
std::string auc_table_to_csv(std::span<const AucRow> rows);
std::vector<AucRow> auc_table_from_csv(std::string_view text);

// Classifier order of first appearance in the table.
std::vector<std::string> classifier_order(std::span<const AucRow> rows);

// CSV: classifier,n,median,mean,std,std_defined,min,q1,q3,max in `order`.
std::string aggregate_to_csv(const AggregateStats& stats,
                             const std::vector<std::string>& order);

}  // namespace peoc::evalx

#endif  // PEOC_EVALX_HPP_
