#include "peoc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "peoc/errors.hpp"
#include "peoc/param_io.hpp"
#include "peoc/rng.hpp"

namespace peoc::baselines {

nn::Layout AEModel::layout(const AEConfig& c) {
  return nn::Layout({{c.input, c.hidden},
                     {c.hidden, c.bottleneck},
                     {c.bottleneck, c.hidden},
                     {c.hidden, c.input}});
}

namespace {

constexpr std::size_t kLayers = 4;

// Activations of every layer; acts[0] is the input.
struct AeTrace {
  std::vector<std::vector<double>> acts;
};

void check_input(const AEConfig& config, std::span<const double> obs) {
  if (obs.size() != static_cast<std::size_t>(config.input)) {
    throw ShapeMismatch("autoencoder input has " + std::to_string(obs.size()) +
                        " entries, expected " + std::to_string(config.input));
  }
}

void ae_forward(const nn::Layout& layout, std::span<const double> params,
                std::span<const double> obs, AeTrace& trace) {
  trace.acts.resize(kLayers + 1);
  trace.acts[0].assign(obs.begin(), obs.end());
  for (std::size_t l = 0; l < kLayers; ++l) {
    const nn::LayerShape& shape = layout.layer(l);
    trace.acts[l + 1].resize(shape.out);
    nn::dense_forward(params.subspan(layout.offset(l), shape.param_count()), shape,
                      trace.acts[l], trace.acts[l + 1]);
    if (l + 1 < kLayers) {
      for (double& a : trace.acts[l + 1]) a = std::max(a, 0.0);
    }
  }
}

// Returns the reconstruction error of one observation; accumulates
// `weight` * d(error) into grads when non-null.
double ae_sample_loss(const nn::Layout& layout, std::span<const double> params,
                      std::span<const double> obs, double weight, AeTrace& trace,
                      std::vector<double>* grads) {
  ae_forward(layout, params, obs, trace);
  const std::vector<double>& recon = trace.acts[kLayers];
  const double inv_dim = 1.0 / static_cast<double>(obs.size());
  double err = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = recon[i] - obs[i];
    err += d * d;
  }
  err *= inv_dim;
  if (grads == nullptr) return err;

  std::vector<double> delta(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    delta[i] = weight * 2.0 * (recon[i] - obs[i]) * inv_dim;
  }
  std::span<double> g(*grads);
  for (std::size_t l = kLayers; l-- > 0;) {
    const nn::LayerShape& shape = layout.layer(l);
    std::vector<double> dx(l > 0 ? shape.in : 0);
    nn::dense_backward(params.subspan(layout.offset(l), shape.param_count()), shape,
                       trace.acts[l], delta, g.subspan(layout.offset(l), shape.param_count()),
                       dx);
    if (l == 0) break;
    for (int i = 0; i < shape.in; ++i) {
      if (trace.acts[l][i] <= 0.0) dx[i] = 0.0;
    }
    delta = std::move(dx);
  }
  return err;
}

}  // namespace

AEModel ae_init(const AEConfig& config) {
  const nn::Layout layout = AEModel::layout(config);
  AEModel model;
  model.config = config;
  model.params = nn::init_params(layout, config.seed);
  model.optimizer = nn::AdamState::for_size(layout.size(),
                                            nn::AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});
  return model;
}

double ae_loss(const AEConfig& config, std::span<const double> params,
               std::span<const std::vector<double>> batch, std::vector<double>* grads) {
  const nn::Layout layout = AEModel::layout(config);
  if (params.size() != layout.size()) {
    throw ShapeMismatch("autoencoder has " + std::to_string(params.size()) +
                        " parameters, expected " + std::to_string(layout.size()));
  }
  if (grads != nullptr && grads->size() != layout.size()) {
    throw ShapeMismatch("autoencoder gradient buffer has the wrong size");
  }
  if (batch.empty()) return 0.0;
  const double weight = 1.0 / static_cast<double>(batch.size());
  AeTrace trace;
  double loss = 0.0;
  for (const auto& obs : batch) {
    check_input(config, obs);
    loss += weight * ae_sample_loss(layout, params, obs, weight, trace, grads);
  }
  return loss;
}

AEModel ae_fit(std::span<const std::vector<double>> train, const AEConfig& config) {
  if (train.empty()) throw EmptyTrainSet("autoencoder needs at least one observation");
  for (const auto& obs : train) check_input(config, obs);

  AEModel model = ae_init(config);
  const nn::Layout layout = AEModel::layout(config);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(mix64(config.seed ^ 0x5AE5AE5AE5AE5AEULL));
  std::vector<std::vector<double>> minibatch;
  std::vector<double> grads(layout.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.minibatch_size) {
      const std::size_t end = std::min(order.size(), begin + config.minibatch_size);
      minibatch.clear();
      for (std::size_t k = begin; k < end; ++k) minibatch.push_back(train[order[k]]);
      std::fill(grads.begin(), grads.end(), 0.0);
      const double loss = ae_loss(config, model.params, minibatch, &grads);
      epoch_loss += loss * static_cast<double>(end - begin);
      nn::AdamResult r = nn::adam_step(std::move(model.params), grads,
                                       std::move(model.optimizer));
      model.params = std::move(r.params);
      model.optimizer = std::move(r.state);
    }
    model.epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return model;
}

std::vector<double> ae_reconstruct(const AEModel& model, std::span<const double> obs) {
  check_input(model.config, obs);
  AeTrace trace;
  ae_forward(AEModel::layout(model.config), model.params, obs, trace);
  return trace.acts[kLayers];
}

double ae_score(const AEModel& model, std::span<const double> obs) {
  const std::vector<double> recon = ae_reconstruct(model, obs);
  double err = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = recon[i] - obs[i];
    err += d * d;
  }
  return err / static_cast<double>(obs.size());
}

void save_autoencoder(const std::filesystem::path& path, const AEModel& model) {
  io::save_params(path, io::kAutoencoderMagic, model.params);
}

AEModel load_autoencoder(const std::filesystem::path& path, const AEConfig& config) {
  AEModel model = ae_init(config);
  std::vector<double> params = io::load_params(path, io::kAutoencoderMagic);
  if (params.size() != model.params.size()) {
    throw FormatError(path.string() + " does not match the configured autoencoder shape");
  }
  model.params = std::move(params);
  return model;
}

KnnIndex knn_fit(std::span<const std::vector<double>> train, int k) {
  if (k < 1) throw RangeError("k must be at least 1");
  if (train.size() < static_cast<std::size_t>(k)) {
    throw TooFewPoints("k-NN with k=" + std::to_string(k) + " needs at least " +
                       std::to_string(k) + " points, got " + std::to_string(train.size()));
  }
  KnnIndex index;
  index.k = k;
  index.dimension = train.front().size();
  index.total = train.size();
  std::map<std::vector<double>, std::size_t> slot;
  for (const auto& p : train) {
    if (p.size() != index.dimension) throw ShapeMismatch("k-NN points differ in dimension");
    auto [it, inserted] = slot.try_emplace(p, index.points.size());
    if (inserted) {
      index.points.push_back(p);
      index.counts.push_back(1);
    } else {
      ++index.counts[it->second];
    }
  }
  return index;
}

double knn_score(const KnnIndex& index, std::span<const double> obs) {
  if (obs.size() != index.dimension) {
    throw ShapeMismatch("query has " + std::to_string(obs.size()) + " entries, expected " +
                        std::to_string(index.dimension));
  }
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(index.points.size());
  for (std::size_t p = 0; p < index.points.size(); ++p) {
    const std::vector<double>& pt = index.points[p];
    double sq = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double d = pt[i] - obs[i];
      sq += d * d;
    }
    dist.emplace_back(std::sqrt(sq), index.counts[p]);
  }
  std::sort(dist.begin(), dist.end());
  std::size_t seen = 0;
  for (const auto& [d, count] : dist) {
    seen += count;
    if (seen >= static_cast<std::size_t>(index.k)) return d;
  }
  return dist.back().first;
}

}  // namespace peoc::baselines
