#include "peoc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "peoc/errors.hpp"
#include "peoc/peoc.hpp"
#include "peoc/rng.hpp"

namespace peoc::bench {

int BenchConfig::updates() const {
  const std::uint64_t u = train_steps / std::max<std::size_t>(ppo.rollout_length, 1);
  return static_cast<int>(std::max<std::uint64_t>(u, 1));
}

void BenchConfig::validate() const {
  auto fail = [](const std::string& what) { throw RangeError(what); };
  if (n_repeats < 1) fail("n_repeats must be at least 1");
  if (m_levels < 1 || m_levels > 65535) fail("m_levels must lie in [1, 65535]");
  if (train_steps < 1) fail("train_steps must be positive");
  if (ind_run_steps < 1) fail("ind_run_steps must be positive");
  if (ood_run_steps < 1) fail("ood_run_steps must be positive");
  if (split.train_parts < 1 || split.test_parts < 1) fail("split parts must be positive");
  if (gate.window < 1) fail("gate_window must be at least 1");
  if (!(gate.fraction >= 0.0 && gate.fraction <= 1.0)) fail("gate_fraction must lie in [0, 1]");
  if (!(gate.max_return >= 0.0)) fail("gate_max_return must be nonnegative");
  if (ae.hidden < 1 || ae.bottleneck < 1) fail("autoencoder layer sizes must be positive");
  if (ae.epochs < 0) fail("ae_epochs must be nonnegative");
  if (ae.minibatch_size < 1) fail("ae_minibatch_size must be positive");
  if (!(ae.learning_rate > 0.0)) fail("ae_learning_rate must be positive");
  if (knn_k < 1) fail("knn_k must be at least 1");

  ppo::PPOConfig p = ppo;
  p.level_seeds = {0};
  p.updates = updates();
  try {
    p.validate();
  } catch (const InvalidConfig& e) {
    fail(e.what());
  }
}

bool operator==(const BenchConfig& a, const BenchConfig& b) {
  return write_config(a) == write_config(b);
}

BenchConfig full_scale_config() {
  BenchConfig c;
  c.n_repeats = 40;
  c.m_levels = 4;
  c.train_steps = 2500000;
  c.ind_run_steps = 30000;
  c.ood_run_steps = 10000;
  c.split = {2, 1};
  return c;
}

namespace {

enum Component : std::uint64_t {
  kLevel = 0,
  kInit,
  kRollout,
  kSplit,
  kAe,
  kIndRun,
  kOodRun,
  kOodStream,
};

std::uint64_t seed_for(std::uint64_t base, int repeat, Component c, int slot) {
  const std::uint64_t index = (static_cast<std::uint64_t>(repeat) << 20) |
                              (static_cast<std::uint64_t>(c) << 16) |
                              static_cast<std::uint64_t>(slot);
  return mix64(base + index);
}

}  // namespace

SeedBundle derive_seeds(std::uint64_t master, int repeat, int m_levels) {
  const std::uint64_t base = mix64(master);
  SeedBundle b;
  for (int j = 0; j < m_levels; ++j) b.level_seeds.push_back(seed_for(base, repeat, kLevel, j));
  b.init_seed = seed_for(base, repeat, kInit, 0);
  b.rollout_seed = seed_for(base, repeat, kRollout, 0);
  b.split_seed = seed_for(base, repeat, kSplit, 0);
  b.ae_seed = seed_for(base, repeat, kAe, 0);
  b.ind_run_seed = seed_for(base, repeat, kIndRun, 0);
  b.ood_run_seed = seed_for(base, repeat, kOodRun, 0);
  b.ood_stream_seed = seed_for(base, repeat, kOodStream, 0);
  return b;
}

double window_mean_return(const ppo::TrainingCurve& curve, int window) {
  if (curve.empty()) return 0.0;
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), curve.size());
  double sum = 0.0;
  for (std::size_t i = curve.size() - w; i < curve.size(); ++i) sum += curve[i].mean_return;
  return sum / static_cast<double>(w);
}

double window_mean_entropy(const ppo::TrainingCurve& curve, int window, bool last) {
  if (curve.empty()) return 0.0;
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), curve.size());
  const std::size_t begin = last ? curve.size() - w : 0;
  double sum = 0.0;
  for (std::size_t i = begin; i < begin + w; ++i) sum += curve[i].mean_entropy;
  return sum / static_cast<double>(w);
}

bool performance_check(const ppo::TrainingCurve& curve, const GateConfig& gate) {
  if (curve.empty()) return false;
  return window_mean_return(curve, gate.window) >= gate.threshold();
}

SampleSet collect_states(const PolicySnapshot& policy, const CollectRequest& request) {
  SampleSet set;
  set.role = request.mode;
  set.observations.reserve(request.steps);
  if (request.training_levels.empty()) {
    throw InvalidConfig("collect_states needs the training levels");
  }
  std::unordered_set<std::uint64_t> training_seeds;
  for (const env::Level& l : request.training_levels) training_seeds.insert(l.seed);

  SplitMix64 actions(request.action_seed);
  SplitMix64 ood_stream(request.ood_stream_seed);
  std::size_t next_level = 0;

  auto next_episode_level = [&]() -> env::Level {
    if (request.mode == RunMode::kInd) {
      const env::Level& l = request.training_levels[next_level];
      next_level = (next_level + 1) % request.training_levels.size();
      return l;
    }
    std::uint64_t seed = ood_stream.next();
    while (training_seeds.contains(seed)) seed = ood_stream.next();
    return env::generate_level(seed);
  };

  env::EnvState state = env::reset(next_episode_level()).state;
  set.episode_seeds.push_back(state.level.seed);
  env::Observation obs;
  while (set.observations.size() < request.steps) {
    env::observe_into(state, obs);
    const nn::Distribution dist = nn::softmax(nn::forward(policy.params, obs).logits);
    const double u = actions.uniform();
    int action = nn::kNumActions - 1;
    double acc = 0.0;
    for (int a = 0; a < nn::kNumActions - 1; ++a) {
      acc += dist.probs[a];
      if (u < acc) {
        action = a;
        break;
      }
    }
    set.observations.push_back(obs);
    env::StepResult next = env::step(state, static_cast<env::Action>(action));
    state = std::move(next.state);
    if (next.done && set.observations.size() < request.steps) {
      state = env::reset(next_episode_level()).state;
      set.episode_seeds.push_back(state.level.seed);
    }
  }
  return set;
}

namespace {

std::vector<evalx::ScoredSample> score_test_set(const Classifier& clf,
                                                std::span<const env::Observation> ind_test,
                                                std::span<const env::Observation> ood) {
  std::vector<evalx::ScoredSample> out;
  out.reserve(ind_test.size() + ood.size());
  for (const auto& o : ind_test) {
    out.push_back({clf.score(o), evalx::Label::kInd, evalx::Source::kIndRun});
  }
  for (const auto& o : ood) {
    out.push_back({clf.score(o), evalx::Label::kOod, evalx::Source::kOodRun});
  }
  return out;
}

}  // namespace

RepeatReport run_process_repeat(const BenchConfig& config, int repeat,
                                const RepeatProgressFn& progress) {
  config.validate();
  const SeedBundle seeds = derive_seeds(config.master_seed, repeat, config.m_levels);
  RepeatReport report;
  report.repeat = repeat;
  report.level_seeds = seeds.level_seeds;

  ppo::PPOConfig ppo_config = config.ppo;
  ppo_config.level_seeds = seeds.level_seeds;
  ppo_config.init_seed = seeds.init_seed;
  ppo_config.rollout_seed = seeds.rollout_seed;
  ppo_config.updates = config.updates();

  ppo::TrainResult trained;
  try {
    ppo::ProgressFn per_update;
    if (progress) per_update = [&](const ppo::CurveEntry& e) { progress(repeat, e); };
    trained = ppo::train(ppo_config, per_update);
  } catch (const NonFiniteLoss& e) {
    report.status = RepeatStatus::kDiscarded;
    report.diagnostic = std::string("training failed: ") + e.what();
    return report;
  }
  report.curve = trained.curve;
  report.final_window_return = window_mean_return(trained.curve, config.gate.window);
  report.first_window_entropy = window_mean_entropy(trained.curve, config.gate.window, false);
  report.final_window_entropy = window_mean_entropy(trained.curve, config.gate.window, true);
  report.first_snapshot = trained.after_update_1;
  report.last_snapshot = trained.after_last_update;

  if (!performance_check(trained.curve, config.gate)) {
    report.status = RepeatStatus::kDiscarded;
    report.diagnostic = "performance gate failed: final-window mean return " +
                        std::to_string(report.final_window_return) + " < " +
                        std::to_string(config.gate.threshold());
    return report;
  }

  std::vector<env::Level> levels;
  for (std::uint64_t s : seeds.level_seeds) levels.push_back(env::generate_level(s));

  // Both snapshots are scored on states visited by the final policy.
  SampleSet ind = collect_states(
      trained.after_last_update,
      {RunMode::kInd, static_cast<std::size_t>(config.ind_run_steps), levels,
       seeds.ind_run_seed, 0});
  SampleSet ood = collect_states(
      trained.after_last_update,
      {RunMode::kOod, static_cast<std::size_t>(config.ood_run_steps), levels,
       seeds.ood_run_seed, seeds.ood_stream_seed});
  report.n_ind = ind.observations.size();
  report.n_ood = ood.observations.size();

  auto [ind_train, ind_test] =
      evalx::train_test_split(std::move(ind.observations), config.split, seeds.split_seed);
  report.n_ind_train = ind_train.size();
  report.n_ind_test = ind_test.size();
  if (ind_test.empty()) {
    report.status = RepeatStatus::kDiscarded;
    report.diagnostic = "IND test split is empty";
    return report;
  }

  // Baselines see only the IND train part, and are fitted before any
  // test-set scoring.
  baselines::AEConfig ae_config = config.ae;
  ae_config.seed = seeds.ae_seed;
  std::vector<std::unique_ptr<Classifier>> roster;
  roster.push_back(std::make_unique<PeocClassifier>("PEOC-1", trained.after_update_1));
  roster.push_back(std::make_unique<PeocClassifier>("PEOC-last", trained.after_last_update));
  roster.push_back(std::make_unique<baselines::AeClassifier>(
      "AE", baselines::ae_fit(ind_train, ae_config)));
  roster.push_back(std::make_unique<baselines::KnnClassifier>(
      "kNN", baselines::knn_fit(ind_train, config.knn_k)));

  for (const auto& clf : roster) {
    const auto scored = score_test_set(*clf, ind_test, ood.observations);
    report.classifiers.push_back({clf->name(), evalx::roc_curve(scored)});
  }
  report.status = RepeatStatus::kAccepted;
  return report;
}

std::vector<RepeatReport> run_repeats(const BenchConfig& config, int jobs,
                                      const RepeatProgressFn& progress) {
  config.validate();
  const int n = config.n_repeats;
  std::vector<RepeatReport> reports(static_cast<std::size_t>(n));
  const int workers = std::clamp(jobs, 1, n);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        reports[static_cast<std::size_t>(i)] = run_process_repeat(config, i, progress);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
  return reports;
}

std::vector<evalx::AucRow> auc_rows(std::span<const RepeatReport> repeats) {
  std::vector<evalx::AucRow> rows;
  for (const RepeatReport& r : repeats) {
    if (r.status != RepeatStatus::kAccepted) continue;
    for (const ClassifierResult& c : r.classifiers) rows.push_back({r.repeat, c.name, c.roc.auc});
  }
  return rows;
}

BenchmarkReport assemble_report(const BenchConfig& config, std::vector<RepeatReport> repeats) {
  BenchmarkReport report;
  report.config = config;
  for (const RepeatReport& r : repeats) {
    (r.status == RepeatStatus::kAccepted ? report.accepted : report.discarded) += 1;
  }
  report.repeats = std::move(repeats);
  if (report.accepted == 0) {
    throw NoAcceptedRepeats("all " + std::to_string(report.discarded) +
                            " repeats were discarded");
  }
  std::map<std::string, std::vector<double>> table;
  for (const evalx::AucRow& row : auc_rows(report.repeats)) table[row.classifier].push_back(row.auc);
  report.aggregate = evalx::aggregate(table);
  return report;
}

BenchmarkReport run_benchmark(const BenchConfig& config, int jobs,
                              const RepeatProgressFn& progress) {
  return assemble_report(config, run_repeats(config, jobs, progress));
}

}  // namespace peoc::bench
