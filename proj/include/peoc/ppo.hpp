#ifndef PEOC_PPO_HPP_
#define PEOC_PPO_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peoc/env.hpp"
#include "peoc/nn.hpp"
#include "peoc/snapshot.hpp"

namespace peoc::ppo {

struct Transition {
  env::Observation obs;
  env::Action action = env::Action::kLeft;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double value_est = 0.0;
  bool done = false;
  double entropy = 0.0;  // policy entropy at obs under the behavior policy
};

struct Trajectory {
  std::vector<Transition> steps;
  // Filled by compute_gae.
  std::vector<double> advantages;
  std::vector<double> return_targets;
  // V(s) of the state following the last transition; 0 if that step was done.
  double bootstrap_value = 0.0;
  // Returns of episodes that finished inside this rollout.
  std::vector<double> episode_returns;
};

// Environment position carried from one rollout to the next.
struct RolloutCursor {
  std::optional<env::EnvState> state;
  std::size_t next_level = 0;
  double episode_return = 0.0;
};

// Samples `len` steps with actions drawn from softmax(forward(params, obs)).
// Episodes cycle through `levels` round-robin.
Trajectory collect_rollout(const nn::PolicyParams& params,
                           std::span<const env::Level> levels, std::size_t len,
                           std::uint64_t rng_seed);
Trajectory collect_rollout(const nn::PolicyParams& params,
                           std::span<const env::Level> levels, std::size_t len,
                           std::uint64_t rng_seed, RolloutCursor& cursor);

// Generalized advantage estimation. Advantages are left unnormalized.
// Throws EmptyTrajectory.
Trajectory compute_gae(Trajectory traj, double gamma, double lambda);

// Zero mean, unit (population) variance; all-equal inputs map to zeros.
std::vector<double> normalize(std::span<const double> values);

struct PPOConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::size_t rollout_length = 1024;
  std::size_t minibatch_size = 256;
  int epochs = 4;
  int updates = 150;
  double learning_rate = 3e-4;
  bool normalize_advantages = true;
  double policy_head_gain = 1.0;
  std::vector<std::uint64_t> level_seeds;
  std::uint64_t init_seed = 0;
  std::uint64_t rollout_seed = 1;

  // Throws InvalidConfig.
  void validate() const;
};

struct PpoSample {
  std::span<const double> obs;
  int action = 0;
  double log_prob_old = 0.0;
  double advantage = 0.0;
  double return_target = 0.0;
};

struct LossStats {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Mean over samples of
//   -min(r A, clip(r, 1-eps, 1+eps) A) + value_coef (V - R)^2 - entropy_coef H
// with r = exp(log pi(a|s) - log_prob_old). Gradients are accumulated into
// `grads` when it is non-null.
LossStats ppo_loss(const nn::PolicyParams& params, std::span<const PpoSample> batch,
                   const PPOConfig& config, nn::GradientBundle* grads);

// r_t(theta) for each sample.
std::vector<double> probability_ratios(const nn::PolicyParams& params,
                                       std::span<const PpoSample> batch);

double action_log_prob(const nn::PolicyParams& params, std::span<const double> obs,
                       int action);

struct UpdateResult {
  nn::PolicyParams params;
  LossStats stats;
};

// epochs x minibatches Adam steps on the clipped surrogate. `traj` must carry
// advantages. Throws NonFiniteLoss.
UpdateResult ppo_update(const nn::PolicyParams& params, const Trajectory& traj,
                        const PPOConfig& config, std::uint64_t rng_seed,
                        nn::AdamState& optimizer);

struct CurveEntry {
  int update = 0;
  double mean_return = 0.0;
  double mean_entropy = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
};

using TrainingCurve = std::vector<CurveEntry>;

struct TrainResult {
  PolicySnapshot after_update_1;
  PolicySnapshot after_last_update;
  TrainingCurve curve;
};

using ProgressFn = std::function<void(const CurveEntry&)>;

TrainResult train(const PPOConfig& config, const ProgressFn& progress = {});

// CSV: update,mean_return,mean_entropy,policy_loss,value_loss
std::string curve_to_csv(const TrainingCurve& curve);
TrainingCurve curve_from_csv(std::string_view text);

}  // namespace peoc::ppo

#endif  // PEOC_PPO_HPP_
