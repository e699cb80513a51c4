#ifndef PEOC_BENCH_HPP_
#define PEOC_BENCH_HPP_

// The benchmarking process: n independent process-repeats of
//   train -> performance gate -> IND runs -> OOD runs -> split ->
//   fit baselines -> score -> ROC/AUC,
// followed by aggregation over the accepted repeats.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peoc/baselines.hpp"
#include "peoc/env.hpp"
#include "peoc/evalx.hpp"
#include "peoc/ppo.hpp"
#include "peoc/snapshot.hpp"

namespace peoc::bench {

struct GateConfig {
  int window = 10;
  double fraction = 0.95;
  double max_return = 10.0;

  double threshold() const { return fraction * max_return; }
};

struct BenchConfig {
  int n_repeats = 40;
  int m_levels = 4;
  std::uint64_t train_steps = 200000;
  std::uint64_t ind_run_steps = 30000;
  std::uint64_t ood_run_steps = 10000;
  evalx::SplitRatio split{2, 1};
  GateConfig gate;
  // Level seeds, init and rollout seeds, and the update count are filled in
  // per repeat.
  ppo::PPOConfig ppo;
  // The seed is filled in per repeat.
  baselines::AEConfig ae;
  int knn_k = 5;
  std::uint64_t master_seed = 0;

  // train_steps / rollout_length, at least 1.
  int updates() const;

  // Throws RangeError.
  void validate() const;

  friend bool operator==(const BenchConfig& a, const BenchConfig& b);
};

// The scaled-down defaults, with the full-scale step budget and repeat count.
BenchConfig full_scale_config();

struct SeedBundle {
  std::vector<std::uint64_t> level_seeds;
  std::uint64_t init_seed = 0;
  std::uint64_t rollout_seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t ae_seed = 0;
  std::uint64_t ind_run_seed = 0;
  std::uint64_t ood_run_seed = 0;
  std::uint64_t ood_stream_seed = 0;

  friend bool operator==(const SeedBundle&, const SeedBundle&) = default;
};

// Every seed is mix64(mix64(master) + index) with a distinct index per
// (repeat, component, slot). mix64 is a bijection, so no two seeds of a run
// collide. Supports up to 65536 levels per repeat.
SeedBundle derive_seeds(std::uint64_t master, int repeat, int m_levels);

// Mean episode return over the last `window` updates must reach the
// gate threshold (inclusive).
bool performance_check(const ppo::TrainingCurve& curve, const GateConfig& gate);

// Mean of `field` over the first / last `window` curve entries.
double window_mean_entropy(const ppo::TrainingCurve& curve, int window, bool last);
double window_mean_return(const ppo::TrainingCurve& curve, int window);

enum class RunMode { kInd, kOod };

struct SampleSet {
  RunMode role = RunMode::kInd;
  std::vector<env::Observation> observations;
  std::vector<std::uint64_t> episode_seeds;  // level seed of each episode run
};

struct CollectRequest {
  RunMode mode = RunMode::kInd;
  std::size_t steps = 0;
  std::span<const env::Level> training_levels;
  std::uint64_t action_seed = 0;
  std::uint64_t ood_stream_seed = 0;  // OOD mode only
};

// Runs the policy with sampled actions and records the observation of every
// step. IND mode cycles the training levels; OOD mode draws a fresh generator
// seed per episode, skipping the training seeds.
SampleSet collect_states(const PolicySnapshot& policy, const CollectRequest& request);

enum class RepeatStatus { kAccepted, kDiscarded };

struct ClassifierResult {
  std::string name;
  evalx::RocCurve roc;
};

struct RepeatReport {
  int repeat = 0;
  std::vector<std::uint64_t> level_seeds;
  RepeatStatus status = RepeatStatus::kDiscarded;
  std::string diagnostic;
  ppo::TrainingCurve curve;
  double final_window_return = 0.0;
  double first_window_entropy = 0.0;
  double final_window_entropy = 0.0;
  std::size_t n_ind = 0;
  std::size_t n_ind_train = 0;
  std::size_t n_ind_test = 0;
  std::size_t n_ood = 0;
  std::vector<ClassifierResult> classifiers;  // empty unless accepted
  std::optional<PolicySnapshot> first_snapshot;
  std::optional<PolicySnapshot> last_snapshot;
};

inline const std::vector<std::string>& classifier_roster() {
  static const std::vector<std::string> kRoster{"PEOC-1", "PEOC-last", "AE", "kNN"};
  return kRoster;
}

using RepeatProgressFn = std::function<void(int repeat, const ppo::CurveEntry&)>;

// A pure function of (config, repeat).
RepeatReport run_process_repeat(const BenchConfig& config, int repeat,
                                const RepeatProgressFn& progress = {});

struct BenchmarkReport {
  BenchConfig config;
  std::vector<RepeatReport> repeats;
  evalx::AggregateStats aggregate;
  std::size_t accepted = 0;
  std::size_t discarded = 0;
};

// Runs all repeats on up to `jobs` threads; results are ordered by index.
std::vector<RepeatReport> run_repeats(const BenchConfig& config, int jobs,
                                      const RepeatProgressFn& progress = {});

// Aggregates the accepted repeats. Throws NoAcceptedRepeats.
BenchmarkReport assemble_report(const BenchConfig& config, std::vector<RepeatReport> repeats);

BenchmarkReport run_benchmark(const BenchConfig& config, int jobs = 1,
                              const RepeatProgressFn& progress = {});

std::vector<evalx::AucRow> auc_rows(std::span<const RepeatReport> repeats);

// --- configuration file -----------------------------------------------------

// `key = value` lines, `#` starts a comment. Omitted keys keep defaults.
// Throws ParseError, UnknownKey, RangeError.
BenchConfig parse_config_text(std::string_view text);
BenchConfig parse_config(const std::filesystem::path& path);

// Every key with its effective value; parse_config_text inverts it exactly.
std::string write_config(const BenchConfig& config);

// Documented key list, one "key  description" line each.
std::string config_schema();

// --- output directory ------------------------------------------------------

// Files written by write_outputs:
//   report.csv, aggregate.csv, report.txt, roc/<r>_<classifier>.csv,
//   curves/<r>_training.csv, snapshots/<r>_{first,last}.bin,
//   plots/roc_<r>.svg, plots/training_<r>.svg, plots/box.svg
void write_repeat_outputs(const std::filesystem::path& dir, const RepeatReport& repeat);
void write_outputs(const std::filesystem::path& dir, const BenchmarkReport& report);

// Human-readable summary including the directional checks.
std::string summary_text(const BenchmarkReport& report);
std::string failure_text(const BenchConfig& config, std::span<const RepeatReport> repeats,
                         const std::string& reason);

}  // namespace peoc::bench

#endif  // PEOC_BENCH_HPP_
