#ifndef PEOC_NN_HPP_
#define PEOC_NN_HPP_

// Small dense networks with hand-written reverse-mode gradients.
//
// Parameters of a network live in one flat vector of doubles. Each dense
// layer stores its weights input-major (w[i * out + o] connects input i to
// output o) followed by its bias. Input-major storage lets the forward pass
// skip zero inputs, which dominate the one-hot observations.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace peoc::nn {

inline constexpr int kNumActions = 4;

struct LayerShape {
  int in = 0;
  int out = 0;
  std::size_t weight_count() const { return static_cast<std::size_t>(in) * out; }
  std::size_t param_count() const { return weight_count() + out; }
};

class Layout {
 public:
  explicit Layout(std::vector<LayerShape> layers);

  const std::vector<LayerShape>& layers() const { return layers_; }
  const LayerShape& layer(std::size_t i) const { return layers_[i]; }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t size() const { return size_; }

 private:
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

// y = W x + b. `params` points at the layer's first weight.
void dense_forward(std::span<const double> params, const LayerShape& shape,
                   std::span<const double> x, std::span<double> y);

// Accumulates dW, db into `grads` (same offset convention as `params`) and,
// if `dx` is non-empty, writes dL/dx.
void dense_backward(std::span<const double> params, const LayerShape& shape,
                    std::span<const double> x, std::span<const double> dy,
                    std::span<double> grads, std::span<double> dx);

// He-style scaled-uniform initialization: weights ~ U(-a, a) with
// a = sqrt(6 / fan_in), so the standard deviation is sqrt(2 / fan_in).
// Biases start at zero.
std::vector<double> init_params(const Layout& layout, std::uint64_t seed);

// Policy-value network: 288 -> 64 -> 64 (ReLU trunk), then a 4-way logit
// head and a scalar value head.
struct PolicyParams {
  static constexpr int kInput = 288;
  static constexpr int kHidden = 64;
  enum LayerIndex : std::size_t { kTrunk1 = 0, kTrunk2 = 1, kPolicyHead = 2, kValueHead = 3 };

  std::vector<double> values;

  static const Layout& layout();
  static PolicyParams zeros();
  // He init everywhere; the policy-head weights are then multiplied by
  // `policy_head_gain`. A small gain starts training from a near-uniform policy.
  static PolicyParams init(std::uint64_t seed, double policy_head_gain = 1.0);

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct GradientBundle {
  std::vector<double> values;

  static GradientBundle zeros_like(const PolicyParams& p) {
    return {std::vector<double>(p.values.size(), 0.0)};
  }
};

struct PolicyOutput {
  std::array<double, kNumActions> logits{};
  double value = 0.0;
};

// Hidden activations kept for the backward pass.
struct PolicyActivations {
  std::array<double, PolicyParams::kHidden> h1{};
  std::array<double, PolicyParams::kHidden> h2{};
};

// Throws ShapeMismatch if obs.size() != 288 or params have the wrong size.
PolicyOutput forward(const PolicyParams& params, std::span<const double> obs);
PolicyOutput forward(const PolicyParams& params, std::span<const double> obs,
                     PolicyActivations& acts);

// Accumulates the gradient of a scalar loss with upstream derivatives
// (dlogits, dvalue) into `grads`.
void backward(const PolicyParams& params, std::span<const double> obs,
              const PolicyActivations& acts,
              const std::array<double, kNumActions>& dlogits, double dvalue,
              GradientBundle& grads);

struct Distribution {
  std::array<double, kNumActions> probs{};
};

Distribution softmax(const std::array<double, kNumActions>& logits);
std::array<double, kNumActions> log_softmax(const std::array<double, kNumActions>& logits);

// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(const Distribution& dist);

// d entropy(softmax(z)) / dz.
std::array<double, kNumActions> entropy_grad_logits(const Distribution& dist);

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  AdamConfig config;

  static AdamState for_size(std::size_t n, AdamConfig config = {}) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0, config};
  }
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct AdamResult {
  std::vector<double> params;
  AdamState state;
};

// Bias-corrected Adam update. Throws ShapeMismatch on size disagreement.
AdamResult adam_step(std::vector<double> params, std::span<const double> grads,
                     AdamState state);

inline PolicyParams adam_step(const PolicyParams& params, const GradientBundle& grads,
                              AdamState& state) {
  AdamResult r = adam_step(params.values, grads.values, std::move(state));
  state = std::move(r.state);
  return {std::move(r.params)};
}

bool all_finite(std::span<const double> values);

}  // namespace peoc::nn

#endif  // PEOC_NN_HPP_
