#include "peoc/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "peoc/csv.hpp"
#include "peoc/errors.hpp"
#include "peoc/rng.hpp"

namespace peoc::ppo {

namespace {

int sample_action(const nn::Distribution& dist, SplitMix64& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int a = 0; a < nn::kNumActions - 1; ++a) {
    acc += dist.probs[a];
    if (u < acc) return a;
  }
  return nn::kNumActions - 1;
}

}  // namespace

Trajectory collect_rollout(const nn::PolicyParams& params,
                           std::span<const env::Level> levels, std::size_t len,
                           std::uint64_t rng_seed) {
  RolloutCursor cursor;
  return collect_rollout(params, levels, len, rng_seed, cursor);
}

Trajectory collect_rollout(const nn::PolicyParams& params,
                           std::span<const env::Level> levels, std::size_t len,
                           std::uint64_t rng_seed, RolloutCursor& cursor) {
  if (levels.empty()) throw InvalidConfig("collect_rollout needs at least one level");
  Trajectory traj;
  traj.steps.reserve(len);
  SplitMix64 rng(rng_seed);

  auto start_episode = [&] {
    cursor.state = env::reset(levels[cursor.next_level % levels.size()]).state;
    cursor.next_level = (cursor.next_level + 1) % levels.size();
    cursor.episode_return = 0.0;
  };
  if (!cursor.state || cursor.state->terminal()) start_episode();

  env::Observation obs;
  for (std::size_t t = 0; t < len; ++t) {
    env::observe_into(*cursor.state, obs);
    const nn::PolicyOutput out = nn::forward(params, obs);
    const nn::Distribution dist = nn::softmax(out.logits);
    const int action = sample_action(dist, rng);
    const auto log_probs = nn::log_softmax(out.logits);

    env::StepResult next = env::step(*cursor.state, static_cast<env::Action>(action));
    cursor.episode_return += next.reward;
    traj.steps.push_back({obs, static_cast<env::Action>(action), log_probs[action],
                          next.reward, out.value, next.done, nn::entropy(dist)});
    cursor.state = std::move(next.state);
    if (next.done) {
      traj.episode_returns.push_back(cursor.episode_return);
      start_episode();
    }
  }

  if (!traj.steps.empty() && !traj.steps.back().done) {
    env::observe_into(*cursor.state, obs);
    traj.bootstrap_value = nn::forward(params, obs).value;
  }
  return traj;
}

Trajectory compute_gae(Trajectory traj, double gamma, double lambda) {
  const std::size_t n = traj.steps.size();
  if (n == 0) throw EmptyTrajectory("cannot estimate advantages of an empty trajectory");
  traj.advantages.assign(n, 0.0);
  traj.return_targets.assign(n, 0.0);
  double next_value = traj.bootstrap_value;
  double next_advantage = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const Transition& tr = traj.steps[i];
    const double not_done = tr.done ? 0.0 : 1.0;
    const double delta = tr.reward + gamma * next_value * not_done - tr.value_est;
    const double adv = delta + gamma * lambda * not_done * next_advantage;
    traj.advantages[i] = adv;
    traj.return_targets[i] = adv + tr.value_est;
    next_value = tr.value_est;
    next_advantage = adv;
  }
  return traj;
}

std::vector<double> normalize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / out.size();
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  var /= out.size();
  const double sd = std::sqrt(var);
  for (double& v : out) v = sd > 0.0 ? (v - mean) / (sd + 1e-8) : 0.0;
  return out;
}

void PPOConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda must lie in [0, 1]");
  if (!(clip_epsilon > 0.0)) fail("clip_epsilon must be positive");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef must be nonnegative");
  if (!(value_coef >= 0.0)) fail("value_coef must be nonnegative");
  if (rollout_length == 0) fail("rollout_length must be positive");
  if (minibatch_size == 0) fail("minibatch_size must be positive");
  if (epochs < 1) fail("epochs must be at least 1");
  if (updates < 1) fail("updates must be at least 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!std::isfinite(policy_head_gain)) fail("policy_head_gain must be finite");
  if (level_seeds.empty()) fail("at least one level seed is required");
}

double action_log_prob(const nn::PolicyParams& params, std::span<const double> obs,
                       int action) {
  return nn::log_softmax(nn::forward(params, obs).logits)[action];
}

std::vector<double> probability_ratios(const nn::PolicyParams& params,
                                       std::span<const PpoSample> batch) {
  std::vector<double> ratios;
  ratios.reserve(batch.size());
  for (const PpoSample& s : batch) {
    ratios.push_back(std::exp(action_log_prob(params, s.obs, s.action) - s.log_prob_old));
  }
  return ratios;
}

LossStats ppo_loss(const nn::PolicyParams& params, std::span<const PpoSample> batch,
                   const PPOConfig& config, nn::GradientBundle* grads) {
  LossStats stats;
  if (batch.empty()) return stats;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double lo = 1.0 - config.clip_epsilon;
  const double hi = 1.0 + config.clip_epsilon;
  nn::PolicyActivations acts;
  std::size_t clipped = 0;

  for (const PpoSample& s : batch) {
    const nn::PolicyOutput out = nn::forward(params, s.obs, acts);
    const nn::Distribution dist = nn::softmax(out.logits);
    const auto log_probs = nn::log_softmax(out.logits);
    const double ratio = std::exp(log_probs[s.action] - s.log_prob_old);
    const double surr_unclipped = ratio * s.advantage;
    const double surr_clipped = std::clamp(ratio, lo, hi) * s.advantage;
    const double policy_loss = -std::min(surr_unclipped, surr_clipped);
    const double value_err = out.value - s.return_target;
    const double value_loss = config.value_coef * value_err * value_err;
    const double h = nn::entropy(dist);

    stats.policy_loss += scale * policy_loss;
    stats.value_loss += scale * value_loss;
    stats.entropy += scale * h;
    if (ratio < lo || ratio > hi) ++clipped;

    if (grads == nullptr) continue;

    // The unclipped branch is active when it is the smaller surrogate; on the
    // clipped branch the gradient vanishes outside [lo, hi].
    double dloss_dlogp = 0.0;
    if (surr_unclipped <= surr_clipped) dloss_dlogp = -s.advantage * ratio;

    const auto dh = nn::entropy_grad_logits(dist);
    std::array<double, nn::kNumActions> dlogits{};
    for (int j = 0; j < nn::kNumActions; ++j) {
      const double dlogp_dz = (j == s.action ? 1.0 : 0.0) - dist.probs[j];
      dlogits[j] = scale * (dloss_dlogp * dlogp_dz - config.entropy_coef * dh[j]);
    }
    const double dvalue = scale * 2.0 * config.value_coef * value_err;
    nn::backward(params, s.obs, acts, dlogits, dvalue, *grads);
  }
  stats.total = stats.policy_loss + stats.value_loss - config.entropy_coef * stats.entropy;
  stats.clip_fraction = static_cast<double>(clipped) * scale;
  return stats;
}

UpdateResult ppo_update(const nn::PolicyParams& params, const Trajectory& traj,
                        const PPOConfig& config, std::uint64_t rng_seed,
                        nn::AdamState& optimizer) {
  const std::size_t n = traj.steps.size();
  if (n == 0) throw EmptyTrajectory("nothing to update on");
  if (traj.advantages.size() != n || traj.return_targets.size() != n) {
    throw InvalidConfig("trajectory has no advantages; run compute_gae first");
  }
  const std::vector<double> advantages =
      config.normalize_advantages ? normalize(traj.advantages) : traj.advantages;

  std::vector<PpoSample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& tr = traj.steps[i];
    samples[i] = {tr.obs, static_cast<int>(tr.action), tr.log_prob_old, advantages[i],
                  traj.return_targets[i]};
  }

  UpdateResult result{params, {}};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<PpoSample> minibatch;
  nn::GradientBundle grads = nn::GradientBundle::zeros_like(params);
  SplitMix64 rng(rng_seed);
  std::size_t count = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < n; begin += config.minibatch_size) {
      const std::size_t end = std::min(n, begin + config.minibatch_size);
      minibatch.clear();
      for (std::size_t k = begin; k < end; ++k) minibatch.push_back(samples[order[k]]);

      std::fill(grads.values.begin(), grads.values.end(), 0.0);
      const LossStats s = ppo_loss(result.params, minibatch, config, &grads);
      if (!std::isfinite(s.total) || !nn::all_finite(grads.values)) {
        throw NonFiniteLoss("epoch " + std::to_string(epoch) + ", minibatch at " +
                            std::to_string(begin) + ": policy " +
                            csv::format_double(s.policy_loss) + ", value " +
                            csv::format_double(s.value_loss));
      }
      result.params = nn::adam_step(result.params, grads, optimizer);

      result.stats.total += s.total;
      result.stats.policy_loss += s.policy_loss;
      result.stats.value_loss += s.value_loss;
      result.stats.entropy += s.entropy;
      result.stats.clip_fraction += s.clip_fraction;
      ++count;
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  result.stats.total *= inv;
  result.stats.policy_loss *= inv;
  result.stats.value_loss *= inv;
  result.stats.entropy *= inv;
  result.stats.clip_fraction *= inv;
  return result;
}

TrainResult train(const PPOConfig& config, const ProgressFn& progress) {
  config.validate();
  std::vector<env::Level> levels;
  levels.reserve(config.level_seeds.size());
  for (std::uint64_t seed : config.level_seeds) levels.push_back(env::generate_level(seed));

  nn::PolicyParams params = nn::PolicyParams::init(config.init_seed, config.policy_head_gain);
  nn::AdamState optimizer = nn::AdamState::for_size(
      params.values.size(), nn::AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});
  RolloutCursor cursor;
  TrainResult result;

  for (int update = 1; update <= config.updates; ++update) {
    const std::uint64_t u = static_cast<std::uint64_t>(update);
    Trajectory traj = collect_rollout(params, levels, config.rollout_length,
                                      mix64(config.rollout_seed + 2 * u), cursor);
    traj = compute_gae(std::move(traj), config.gamma, config.gae_lambda);

    CurveEntry entry;
    entry.update = update;
    if (!traj.episode_returns.empty()) {
      entry.mean_return =
          std::accumulate(traj.episode_returns.begin(), traj.episode_returns.end(), 0.0) /
          static_cast<double>(traj.episode_returns.size());
    }
    double entropy_sum = 0.0;
    for (const Transition& tr : traj.steps) entropy_sum += tr.entropy;
    entry.mean_entropy = entropy_sum / static_cast<double>(traj.steps.size());

    UpdateResult up = ppo_update(params, traj, config,
                                 mix64(config.rollout_seed + 2 * u + 1), optimizer);
    params = std::move(up.params);
    entry.policy_loss = up.stats.policy_loss;
    entry.value_loss = up.stats.value_loss;
    result.curve.push_back(entry);
    if (progress) progress(entry);

    if (update == 1) {
      result.after_update_1 = {params, SnapshotTag::kAfterUpdate1, config.init_seed, 1};
    }
  }
  result.after_last_update = {params, SnapshotTag::kAfterLastUpdate, config.init_seed,
                              config.updates};
  return result;
}

std::string curve_to_csv(const TrainingCurve& curve) {
  std::ostringstream os;
  os << "update,mean_return,mean_entropy,policy_loss,value_loss\n";
  for (const CurveEntry& e : curve) {
    os << e.update << ',' << csv::format_double(e.mean_return) << ','
       << csv::format_double(e.mean_entropy) << ',' << csv::format_double(e.policy_loss)
       << ',' << csv::format_double(e.value_loss) << '\n';
  }
  return os.str();
}

TrainingCurve curve_from_csv(std::string_view text) {
  const csv::Table table =
      csv::parse(text, {"update", "mean_return", "mean_entropy", "policy_loss", "value_loss"});
  TrainingCurve curve;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    curve.push_back({static_cast<int>(csv::parse_int(row[0], line)),
                     csv::parse_double(row[1], line), csv::parse_double(row[2], line),
                     csv::parse_double(row[3], line), csv::parse_double(row[4], line)});
  }
  return curve;
}

}  // namespace peoc::ppo
