#include <functional>
#include <set>
#include <sstream>

#include "peoc/bench.hpp"
#include "peoc/csv.hpp"
#include "peoc/errors.hpp"

namespace peoc::bench {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

int parse_int_value(std::string_view v, std::size_t line) {
  const std::int64_t x = csv::parse_int(v, line);
  if (x < INT32_MIN || x > INT32_MAX) throw RangeError("value out of range: " + std::string(v));
  return static_cast<int>(x);
}

std::size_t parse_count(std::string_view v, std::size_t line) {
  return static_cast<std::size_t>(csv::parse_u64(v, line));
}

bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(line, "expected true or false, got '" + std::string(v) + "'");
}

struct Field {
  const char* key;
  const char* doc;
  std::function<std::string(const BenchConfig&)> get;
  std::function<void(BenchConfig&, std::string_view, std::size_t)> set;
};

template <typename T>
std::string show(T v) {
  if constexpr (std::is_same_v<T, double>) {
    return csv::format_double(v);
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else {
    return std::to_string(v);
  }
}

#define INT_FIELD(key, doc, member) \
  Field{key, doc, [](const BenchConfig& c) { return show(c.member); }, \
        [](BenchConfig& c, std::string_view v, std::size_t l) { c.member = parse_int_value(v, l); }}
#define U64_FIELD(key, doc, member) \
  Field{key, doc, [](const BenchConfig& c) { return show(c.member); }, \
        [](BenchConfig& c, std::string_view v, std::size_t l) { c.member = csv::parse_u64(v, l); }}
#define COUNT_FIELD(key, doc, member) \
  Field{key, doc, [](const BenchConfig& c) { return show(c.member); }, \
        [](BenchConfig& c, std::string_view v, std::size_t l) { c.member = parse_count(v, l); }}
#define REAL_FIELD(key, doc, member) \
  Field{key, doc, [](const BenchConfig& c) { return show(c.member); }, \
        [](BenchConfig& c, std::string_view v, std::size_t l) { c.member = csv::parse_double(v, l); }}
#define BOOL_FIELD(key, doc, member) \
  Field{key, doc, [](const BenchConfig& c) { return show(c.member); }, \
        [](BenchConfig& c, std::string_view v, std::size_t l) { c.member = parse_bool(v, l); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields{
      INT_FIELD("n_repeats", "number of process-repeats", n_repeats),
      INT_FIELD("m_levels", "training levels per repeat", m_levels),
      U64_FIELD("train_steps", "policy training steps per repeat", train_steps),
      U64_FIELD("ind_run_steps", "IND run steps per repeat", ind_run_steps),
      U64_FIELD("ood_run_steps", "OOD run steps per repeat", ood_run_steps),
      INT_FIELD("split_train_parts", "train share of the IND train/test split", split.train_parts),
      INT_FIELD("split_test_parts", "test share of the IND train/test split", split.test_parts),
      INT_FIELD("gate_window", "updates averaged by the performance gate", gate.window),
      REAL_FIELD("gate_fraction", "required fraction of the maximum return", gate.fraction),
      REAL_FIELD("gate_max_return", "maximum achievable episode return", gate.max_return),
      U64_FIELD("master_seed", "seed all per-repeat seeds derive from", master_seed),
      REAL_FIELD("ppo_gamma", "discount factor", ppo.gamma),
      REAL_FIELD("ppo_gae_lambda", "GAE lambda", ppo.gae_lambda),
      REAL_FIELD("ppo_clip_epsilon", "PPO ratio clip range", ppo.clip_epsilon),
      REAL_FIELD("ppo_entropy_coef", "entropy bonus coefficient", ppo.entropy_coef),
      REAL_FIELD("ppo_value_coef", "value loss coefficient", ppo.value_coef),
      COUNT_FIELD("ppo_rollout_length", "environment steps per update", ppo.rollout_length),
      COUNT_FIELD("ppo_minibatch_size", "samples per Adam step", ppo.minibatch_size),
      INT_FIELD("ppo_epochs", "passes over each rollout", ppo.epochs),
      REAL_FIELD("ppo_learning_rate", "Adam learning rate", ppo.learning_rate),
      BOOL_FIELD("ppo_normalize_advantages", "normalize advantages per update",
                 ppo.normalize_advantages),
      REAL_FIELD("ppo_policy_head_gain", "scale of the initial policy-head weights",
                 ppo.policy_head_gain),
      INT_FIELD("ae_hidden", "autoencoder hidden width", ae.hidden),
      INT_FIELD("ae_bottleneck", "autoencoder code width", ae.bottleneck),
      INT_FIELD("ae_epochs", "autoencoder training epochs", ae.epochs),
      COUNT_FIELD("ae_minibatch_size", "autoencoder minibatch size", ae.minibatch_size),
      REAL_FIELD("ae_learning_rate", "autoencoder Adam learning rate", ae.learning_rate),
      INT_FIELD("knn_k", "neighbor rank used by the k-NN scorer", knn_k),
  };
  return kFields;
}

#undef INT_FIELD
#undef U64_FIELD
#undef COUNT_FIELD
#undef REAL_FIELD
#undef BOOL_FIELD

}  // namespace

BenchConfig parse_config_text(std::string_view text) {
  BenchConfig config;
  std::istringstream is{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
    const auto& fs = fields();
    const auto it = std::find_if(fs.begin(), fs.end(),
                                 [&](const Field& f) { return key == f.key; });
    if (it == fs.end()) {
      throw UnknownKey("line " + std::to_string(line_no) + ": '" + key + "'");
    }
    if (!seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");
    it->set(config, value, line_no);
  }
  config.validate();
  return config;
}

BenchConfig parse_config(const std::filesystem::path& path) {
  return parse_config_text(csv::read_file(path));
}

std::string write_config(const BenchConfig& config) {
  std::ostringstream os;
  for (const Field& f : fields()) os << f.key << " = " << f.get(config) << '\n';
  return os.str();
}

std::string config_schema() {
  std::ostringstream os;
  const BenchConfig defaults;
  for (const Field& f : fields()) {
    os << f.key << " (default " << f.get(defaults) << "): " << f.doc << '\n';
  }
  return os.str();
}

}  // namespace peoc::bench
