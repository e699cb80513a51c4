// Command-line front end for the PEOC benchmark kit.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "peoc/bench.hpp"
#include "peoc/csv.hpp"
#include "peoc/env.hpp"
#include "peoc/errors.hpp"
#include "peoc/peoc.hpp"
#include "peoc/ppo.hpp"
#include "peoc/rng.hpp"
#include "peoc/svg.hpp"

namespace fs = std::filesystem;
using namespace peoc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("PEOC_BENCH_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "peoc_out";
}

struct CommonFlags {
  std::string config;
  std::string out = default_out_dir();
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  int jobs = 1;
  bool quiet = false;
};

bench::BenchConfig load_config(const CommonFlags& flags) {
  bench::BenchConfig config = flags.config.empty() ? bench::BenchConfig{}
                                                   : bench::parse_config(flags.config);
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.repeats) config.n_repeats = *flags.repeats;
  config.validate();
  return config;
}

int bench_run(const CommonFlags& flags) {
  const bench::BenchConfig config = load_config(flags);
  std::mutex log_mutex;
  bench::RepeatProgressFn progress;
  if (!flags.quiet) {
    progress = [&](int repeat, const ppo::CurveEntry& e) {
      if (e.update % 25 != 0 && e.update != config.updates()) return;
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "[repeat " << repeat << "] update " << e.update << "/" << config.updates()
                << " return " << e.mean_return << " entropy " << e.mean_entropy << '\n';
    };
  }
  std::vector<bench::RepeatReport> repeats = bench::run_repeats(config, flags.jobs, progress);
  const fs::path out(flags.out);
  fs::create_directories(out);
  try {
    const bench::BenchmarkReport report = bench::assemble_report(config, repeats);
    bench::write_outputs(out, report);
    if (!flags.quiet) std::cout << bench::summary_text(report);
  } catch (const NoAcceptedRepeats& e) {
    for (const auto& r : repeats) bench::write_repeat_outputs(out, r);
    csv::write_file(out / "report.txt", bench::failure_text(config, repeats, e.what()));
    throw;
  }
  return kExitOk;
}

int bench_aggregate(const std::string& report_csv, const std::string& out_dir) {
  const auto rows = evalx::auc_table_from_csv(csv::read_file(report_csv));
  std::map<std::string, std::vector<double>> table;
  for (const auto& r : rows) table[r.classifier].push_back(r.auc);
  const auto stats = evalx::aggregate(table);
  const fs::path out(out_dir);
  fs::create_directories(out / "plots");
  csv::write_file(out / "aggregate.csv",
                  evalx::aggregate_to_csv(stats, evalx::classifier_order(rows)));
  svg::PlotSpec spec;
  spec.inputs = {report_csv};
  spec.output = out / "plots" / "box.svg";
  spec.title = "ROC AUC by classifier";
  svg::emit_box_svg(spec);
  std::cout << csv::read_file(out / "aggregate.csv");
  return kExitOk;
}

int level_dump(std::uint64_t seed, const std::string& out) {
  const std::string text = env::to_text(env::generate_level(seed));
  if (out.empty()) {
    std::cout << text;
  } else {
    csv::write_file(out, text);
  }
  return kExitOk;
}

int policy_train(const CommonFlags& flags, std::optional<int> updates) {
  const bench::BenchConfig config = load_config(flags);
  const bench::SeedBundle seeds = bench::derive_seeds(config.master_seed, 0, config.m_levels);
  ppo::PPOConfig ppo_config = config.ppo;
  ppo_config.level_seeds = seeds.level_seeds;
  ppo_config.init_seed = seeds.init_seed;
  ppo_config.rollout_seed = seeds.rollout_seed;
  ppo_config.updates = updates.value_or(config.updates());

  ppo::ProgressFn progress;
  if (!flags.quiet) {
    progress = [](const ppo::CurveEntry& e) {
      std::cerr << "update " << e.update << " return " << e.mean_return << " entropy "
                << e.mean_entropy << '\n';
    };
  }
  const ppo::TrainResult result = ppo::train(ppo_config, progress);
  const fs::path out(flags.out);
  fs::create_directories(out);
  csv::write_file(out / "training.csv", ppo::curve_to_csv(result.curve));
  save_snapshot(out / "first.bin", result.after_update_1);
  save_snapshot(out / "last.bin", result.after_last_update);
  std::string seeds_text;
  for (std::uint64_t s : seeds.level_seeds) seeds_text += std::to_string(s) + '\n';
  csv::write_file(out / "level_seeds.txt", seeds_text);
  const bool passed = bench::performance_check(result.curve, config.gate);
  std::cout << "final-window mean return "
            << bench::window_mean_return(result.curve, config.gate.window)
            << (passed ? " (gate passed)" : " (gate failed)") << '\n';
  return kExitOk;
}

int policy_eval(const std::string& snapshot_path, const std::vector<std::uint64_t>& level_seeds,
                int episodes, std::uint64_t seed) {
  PolicySnapshot snapshot;
  snapshot.params = load_policy_params(snapshot_path);
  SplitMix64 rng(seed);
  for (std::uint64_t level_seed : level_seeds) {
    const env::Level level = env::generate_level(level_seed);
    double total_return = 0.0;
    double entropy_sum = 0.0;
    std::size_t steps = 0;
    for (int ep = 0; ep < episodes; ++ep) {
      env::ResetResult start = env::reset(level);
      env::EnvState state = start.state;
      env::Observation obs = start.observation;
      while (!state.terminal()) {
        const nn::Distribution dist = nn::softmax(nn::forward(snapshot.params, obs).logits);
        entropy_sum += nn::entropy(dist);
        ++steps;
        const double u = rng.uniform();
        int action = nn::kNumActions - 1;
        double acc = 0.0;
        for (int a = 0; a < nn::kNumActions - 1; ++a) {
          acc += dist.probs[a];
          if (u < acc) {
            action = a;
            break;
          }
        }
        env::StepResult next = env::step(state, static_cast<env::Action>(action));
        total_return += next.reward;
        state = std::move(next.state);
        obs = std::move(next.observation);
      }
    }
    std::cout << "level " << level_seed << ": episodes " << episodes << ", mean return "
              << total_return / episodes << ", mean entropy "
              << (steps > 0 ? entropy_sum / static_cast<double>(steps) : 0.0) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PEOC: policy-entropy out-of-distribution benchmark kit"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config, "Benchmark config file (key = value lines)");
    cmd->add_option("--out", flags.out, "Output directory (default $PEOC_BENCH_OUT)");
    cmd->add_option("--seed", flags.seed, "Master seed, overrides the config");
    cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
  };

  auto* bench_cmd = app.add_subcommand("bench", "Run or aggregate benchmarks");
  bench_cmd->require_subcommand(1);
  auto* bench_run_cmd = bench_cmd->add_subcommand("run", "Run the full benchmark");
  add_common(bench_run_cmd);
  bench_run_cmd->add_option("--repeats", flags.repeats, "Number of process-repeats")
      ->check(CLI::PositiveNumber);
  bench_run_cmd->add_option("--jobs", flags.jobs, "Repeats run in parallel")
      ->check(CLI::PositiveNumber);
  auto* bench_schema_cmd = bench_cmd->add_subcommand("schema", "Print the config keys");

  std::string report_csv;
  auto* bench_agg_cmd = bench_cmd->add_subcommand("aggregate", "Aggregate a report.csv");
  bench_agg_cmd->add_option("--report", report_csv, "Per-repeat AUC table (repeat,classifier,auc)")
      ->required();
  bench_agg_cmd->add_option("--out", flags.out, "Output directory");

  auto* level_cmd = app.add_subcommand("level", "Inspect generated levels");
  level_cmd->require_subcommand(1);
  auto* level_dump_cmd = level_cmd->add_subcommand("dump", "Print a level as text");
  std::uint64_t level_seed = 0;
  std::string level_out;
  level_dump_cmd->add_option("--seed", level_seed, "Level seed")->required();
  level_dump_cmd->add_option("--out", level_out, "Write to a file instead of stdout");

  auto* policy_cmd = app.add_subcommand("policy", "Train or inspect a single policy");
  policy_cmd->require_subcommand(1);
  auto* policy_train_cmd = policy_cmd->add_subcommand("train", "Train one policy");
  add_common(policy_train_cmd);
  std::optional<int> updates;
  policy_train_cmd->add_option("--updates", updates, "Number of PPO updates")
      ->check(CLI::PositiveNumber);

  auto* policy_eval_cmd = policy_cmd->add_subcommand("eval", "Run a stored snapshot");
  std::string snapshot_path;
  std::vector<std::uint64_t> eval_levels;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  policy_eval_cmd->add_option("--snapshot", snapshot_path, "Snapshot .bin file")
      ->required();
  policy_eval_cmd->add_option("--level", eval_levels, "Level seed (repeatable)")->required();
  policy_eval_cmd->add_option("--episodes", episodes, "Episodes per level")
      ->check(CLI::PositiveNumber);
  policy_eval_cmd->add_option("--seed", eval_seed, "Action sampling seed");

  auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from CSV files");
  plot_cmd->require_subcommand(1);
  svg::PlotSpec plot_spec;
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  auto add_plot = [&](const std::string& name, const std::string& help) {
    auto* cmd = plot_cmd->add_subcommand(name, help);
    cmd->add_option("--in", plot_inputs, "Input CSV (repeatable for roc)")
        ->required();
    cmd->add_option("--out", plot_out, "Output SVG path")->required();
    cmd->add_option("--title", plot_spec.title, "Plot title");
    cmd->add_option("--label", plot_spec.labels, "Series label per input");
    cmd->add_option("--x-label", plot_spec.x_label, "x axis label");
    cmd->add_option("--y-label", plot_spec.y_label, "y axis label");
    return cmd;
  };
  auto* plot_roc_cmd = add_plot("roc", "ROC curves from threshold,fpr,tpr files");
  auto* plot_training_cmd = add_plot("training", "Return and entropy over updates");
  auto* plot_box_cmd = add_plot("box", "AUC box plot from a repeat,classifier,auc table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bench_run_cmd) return bench_run(flags);
    if (*bench_schema_cmd) {
      std::cout << bench::config_schema();
      return kExitOk;
    }
    if (*bench_agg_cmd) return bench_aggregate(report_csv, flags.out);
    if (*level_dump_cmd) return level_dump(level_seed, level_out);
    if (*policy_train_cmd) return policy_train(flags, updates);
    if (*policy_eval_cmd) return policy_eval(snapshot_path, eval_levels, episodes, eval_seed);

    for (const auto& in : plot_inputs) plot_spec.inputs.emplace_back(in);
    plot_spec.output = plot_out;
    if (*plot_roc_cmd) svg::emit_roc_svg(plot_spec);
    if (*plot_training_cmd) svg::emit_training_svg(plot_spec);
    if (*plot_box_cmd) svg::emit_box_svg(plot_spec);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kData ? kExitData : kExitInternal;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
