#ifndef PEOC_BASELINES_HPP_
#define PEOC_BASELINES_HPP_

// Non-policy one-class baselines fitted on in-distribution observations:
// an autoencoder scored by reconstruction error and a k-nearest-neighbor
// distance scorer.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "peoc/nn.hpp"
#include "peoc/peoc.hpp"

namespace peoc::baselines {

struct AEConfig {
  int input = 288;
  int hidden = 64;
  int bottleneck = 16;
  int epochs = 50;
  std::size_t minibatch_size = 128;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// Encoder input -> hidden -> bottleneck, decoder bottleneck -> hidden -> input.
// Hidden layers use ReLU, the output layer is linear.
struct AEModel {
  AEConfig config;
  std::vector<double> params;
  nn::AdamState optimizer;
  std::vector<double> epoch_losses;  // mean training loss of each epoch

  static nn::Layout layout(const AEConfig& config);
};

AEModel ae_init(const AEConfig& config);

// Minibatch Adam on mean squared reconstruction error. Throws EmptyTrainSet.
AEModel ae_fit(std::span<const std::vector<double>> train, const AEConfig& config);

std::vector<double> ae_reconstruct(const AEModel& model, std::span<const double> obs);

// Mean squared reconstruction error. Throws ShapeMismatch.
double ae_score(const AEModel& model, std::span<const double> obs);

// Mean over the batch of the per-observation reconstruction error, with its
// gradient accumulated into `grads` when non-null.
double ae_loss(const AEConfig& config, std::span<const double> params,
               std::span<const std::vector<double>> batch, std::vector<double>* grads);

void save_autoencoder(const std::filesystem::path& path, const AEModel& model);
AEModel load_autoencoder(const std::filesystem::path& path, const AEConfig& config);

// Exact k-NN over stored points. Identical points are kept once with a
// multiplicity, which leaves every distance order statistic unchanged.
struct KnnIndex {
  int k = 5;
  std::size_t dimension = 0;
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

// Throws TooFewPoints when train.size() < k.
KnnIndex knn_fit(std::span<const std::vector<double>> train, int k = 5);

// Euclidean distance to the k-th nearest stored point.
double knn_score(const KnnIndex& index, std::span<const double> obs);

class AeClassifier final : public Classifier {
 public:
  AeClassifier(std::string name, AEModel model)
      : name_(std::move(name)), model_(std::move(model)) {}
  const std::string& name() const override { return name_; }
  double score(std::span<const double> obs) const override { return ae_score(model_, obs); }
  const AEModel& model() const { return model_; }

 private:
  std::string name_;
  AEModel model_;
};

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(std::string name, KnnIndex index)
      : name_(std::move(name)), index_(std::move(index)) {}
  const std::string& name() const override { return name_; }
  double score(std::span<const double> obs) const override {
    return knn_score(index_, obs);
  }

 private:
  std::string name_;
  KnnIndex index_;
};

}  // namespace peoc::baselines

#endif  // PEOC_BASELINES_HPP_
