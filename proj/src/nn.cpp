#include "peoc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peoc/errors.hpp"
#include "peoc/rng.hpp"

namespace peoc::nn {

Layout::Layout(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
  offsets_.reserve(layers_.size());
  for (const LayerShape& l : layers_) {
    offsets_.push_back(size_);
    size_ += l.param_count();
  }
}

void dense_forward(std::span<const double> params, const LayerShape& shape,
                   std::span<const double> x, std::span<double> y) {
  const double* w = params.data();
  const double* b = w + shape.weight_count();
  std::copy(b, b + shape.out, y.begin());
  for (int i = 0; i < shape.in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = w + static_cast<std::size_t>(i) * shape.out;
    for (int o = 0; o < shape.out; ++o) y[o] += xi * row[o];
  }
}

void dense_backward(std::span<const double> params, const LayerShape& shape,
                    std::span<const double> x, std::span<const double> dy,
                    std::span<double> grads, std::span<double> dx) {
  const double* w = params.data();
  double* gw = grads.data();
  double* gb = gw + shape.weight_count();
  for (int o = 0; o < shape.out; ++o) gb[o] += dy[o];
  for (int i = 0; i < shape.in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* grow = gw + static_cast<std::size_t>(i) * shape.out;
    for (int o = 0; o < shape.out; ++o) grow[o] += xi * dy[o];
  }
  if (dx.empty()) return;
  for (int i = 0; i < shape.in; ++i) {
    const double* row = w + static_cast<std::size_t>(i) * shape.out;
    double acc = 0.0;
    for (int o = 0; o < shape.out; ++o) acc += row[o] * dy[o];
    dx[i] = acc;
  }
}

std::vector<double> init_params(const Layout& layout, std::uint64_t seed) {
  std::vector<double> values(layout.size(), 0.0);
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l < layout.layers().size(); ++l) {
    const LayerShape& shape = layout.layer(l);
    const double bound = std::sqrt(6.0 / shape.in);
    double* w = values.data() + layout.offset(l);
    for (std::size_t k = 0; k < shape.weight_count(); ++k) {
      w[k] = rng.uniform(-bound, bound);
    }
  }
  return values;
}

const Layout& PolicyParams::layout() {
  static const Layout kLayout({{kInput, kHidden},
                               {kHidden, kHidden},
                               {kHidden, kNumActions},
                               {kHidden, 1}});
  return kLayout;
}

PolicyParams PolicyParams::zeros() {
  return {std::vector<double>(layout().size(), 0.0)};
}

PolicyParams PolicyParams::init(std::uint64_t seed, double policy_head_gain) {
  PolicyParams p{init_params(layout(), seed)};
  const LayerShape& head = layout().layer(kPolicyHead);
  const std::size_t begin = layout().offset(kPolicyHead);
  for (std::size_t k = 0; k < head.weight_count(); ++k) p.values[begin + k] *= policy_head_gain;
  return p;
}

namespace {

void check_shapes(const PolicyParams& params, std::span<const double> obs) {
  if (obs.size() != static_cast<std::size_t>(PolicyParams::kInput)) {
    throw ShapeMismatch("observation has " + std::to_string(obs.size()) +
                        " entries, expected " +
                        std::to_string(PolicyParams::kInput));
  }
  if (params.values.size() != PolicyParams::layout().size()) {
    throw ShapeMismatch("policy has " + std::to_string(params.values.size()) +
                        " parameters, expected " +
                        std::to_string(PolicyParams::layout().size()));
  }
}

std::span<const double> layer_params(const PolicyParams& p, std::size_t l) {
  const Layout& layout = PolicyParams::layout();
  return std::span<const double>(p.values).subspan(layout.offset(l),
                                                   layout.layer(l).param_count());
}

std::span<double> layer_grads(GradientBundle& g, std::size_t l) {
  const Layout& layout = PolicyParams::layout();
  return std::span<double>(g.values).subspan(layout.offset(l),
                                             layout.layer(l).param_count());
}

}  // namespace

PolicyOutput forward(const PolicyParams& params, std::span<const double> obs) {
  PolicyActivations acts;
  return forward(params, obs, acts);
}

PolicyOutput forward(const PolicyParams& params, std::span<const double> obs,
                     PolicyActivations& acts) {
  check_shapes(params, obs);
  const Layout& layout = PolicyParams::layout();
  using P = PolicyParams;

  dense_forward(layer_params(params, P::kTrunk1), layout.layer(P::kTrunk1), obs, acts.h1);
  for (double& h : acts.h1) h = std::max(h, 0.0);
  dense_forward(layer_params(params, P::kTrunk2), layout.layer(P::kTrunk2), acts.h1, acts.h2);
  for (double& h : acts.h2) h = std::max(h, 0.0);

  PolicyOutput out;
  dense_forward(layer_params(params, P::kPolicyHead), layout.layer(P::kPolicyHead),
                acts.h2, out.logits);
  std::array<double, 1> value{};
  dense_forward(layer_params(params, P::kValueHead), layout.layer(P::kValueHead),
                acts.h2, value);
  out.value = value[0];
  return out;
}

void backward(const PolicyParams& params, std::span<const double> obs,
              const PolicyActivations& acts,
              const std::array<double, kNumActions>& dlogits, double dvalue,
              GradientBundle& grads) {
  const Layout& layout = PolicyParams::layout();
  using P = PolicyParams;
  if (grads.values.size() != layout.size()) {
    throw ShapeMismatch("gradient bundle does not match the policy layout");
  }

  std::array<double, P::kHidden> dh2{};
  std::array<double, P::kHidden> tmp{};
  dense_backward(layer_params(params, P::kPolicyHead), layout.layer(P::kPolicyHead),
                 acts.h2, dlogits, layer_grads(grads, P::kPolicyHead), dh2);
  const std::array<double, 1> dv{dvalue};
  dense_backward(layer_params(params, P::kValueHead), layout.layer(P::kValueHead),
                 acts.h2, dv, layer_grads(grads, P::kValueHead), tmp);
  for (int i = 0; i < P::kHidden; ++i) {
    dh2[i] = acts.h2[i] > 0.0 ? dh2[i] + tmp[i] : 0.0;
  }

  std::array<double, P::kHidden> dh1{};
  dense_backward(layer_params(params, P::kTrunk2), layout.layer(P::kTrunk2), acts.h1,
                 dh2, layer_grads(grads, P::kTrunk2), dh1);
  for (int i = 0; i < P::kHidden; ++i) {
    if (acts.h1[i] <= 0.0) dh1[i] = 0.0;
  }
  dense_backward(layer_params(params, P::kTrunk1), layout.layer(P::kTrunk1), obs, dh1,
                 layer_grads(grads, P::kTrunk1), {});
}

Distribution softmax(const std::array<double, kNumActions>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  Distribution d;
  double sum = 0.0;
  for (int i = 0; i < kNumActions; ++i) {
    d.probs[i] = std::exp(logits[i] - mx);
    sum += d.probs[i];
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

std::array<double, kNumActions> log_softmax(const std::array<double, kNumActions>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double log_norm = mx + std::log(sum);
  std::array<double, kNumActions> out;
  for (int i = 0; i < kNumActions; ++i) out[i] = logits[i] - log_norm;
  return out;
}

double entropy(const Distribution& dist) {
  double h = 0.0;
  for (double p : dist.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::array<double, kNumActions> entropy_grad_logits(const Distribution& dist) {
  // dH/dz_j = -p_j (ln p_j + H)
  const double h = entropy(dist);
  std::array<double, kNumActions> g{};
  for (int j = 0; j < kNumActions; ++j) {
    const double p = dist.probs[j];
    g[j] = p > 0.0 ? -p * (std::log(p) + h) : 0.0;
  }
  return g;
}

AdamResult adam_step(std::vector<double> params, std::span<const double> grads,
                     AdamState state) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ShapeMismatch("adam_step: params " + std::to_string(n) + ", grads " +
                        std::to_string(grads.size()) + ", moments " +
                        std::to_string(state.m.size()));
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
  return {std::move(params), std::move(state)};
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace peoc::nn
