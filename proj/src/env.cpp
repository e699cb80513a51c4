#include "peoc/env.hpp"

#include <deque>
#include <sstream>

#include "peoc/errors.hpp"
#include "peoc/rng.hpp"

namespace peoc::env {

namespace {

constexpr int kMinWallColumn = 2;
constexpr int kMaxWallColumn = kWidth - 3;

bool try_layout(std::uint64_t seed, int attempt, Level& level) {
  // Attempt 0 uses the seed itself as the stream state.
  SplitMix64 rng(seed ^ mix64(static_cast<std::uint64_t>(attempt)));

  level.seed = seed;
  level.tiles.fill(Tile::kEmpty);
  level.start = {0, kHeight - 1};
  level.coin = {kWidth - 1, kHeight - 1};

  const int n_walls = 3 + static_cast<int>(rng.below(3));
  std::array<bool, kWidth> used{};
  for (int placed = 0; placed < n_walls;) {
    const int x = kMinWallColumn +
                  static_cast<int>(rng.below(kMaxWallColumn - kMinWallColumn + 1));
    if (used[x]) continue;
    used[x] = true;
    const int gap = static_cast<int>(rng.below(kHeight));
    for (int y = 0; y < kHeight; ++y) {
      if (y != gap) level.tiles[cell_index({x, y})] = Tile::kWall;
    }
    ++placed;
  }

  const int n_hazards = 2 + static_cast<int>(rng.below(3));
  for (int placed = 0; placed < n_hazards;) {
    // Columns 0 and kWidth-1 hold start and coin.
    const int x = 1 + static_cast<int>(rng.below(kWidth - 2));
    const int y = static_cast<int>(rng.below(kHeight));
    Tile& tile = level.tiles[cell_index({x, y})];
    if (tile != Tile::kEmpty) continue;
    tile = Tile::kHazard;
    ++placed;
  }

  level.tiles[cell_index(level.coin)] = Tile::kCoin;
  return shortest_path_length(level) >= 0;
}

}  // namespace

Cell move(Cell from, Action action) {
  switch (action) {
    case Action::kLeft:
      return {from.x - 1, from.y};
    case Action::kRight:
      return {from.x + 1, from.y};
    case Action::kUp:
      return {from.x, from.y - 1};
    case Action::kDown:
      return {from.x, from.y + 1};
  }
  return from;
}

int shortest_path_length(const Level& level) {
  std::array<int, kCells> dist;
  dist.fill(-1);
  std::deque<Cell> frontier{level.start};
  dist[cell_index(level.start)] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    if (c == level.coin) return dist[cell_index(c)];
    for (int a = 0; a < kNumActions; ++a) {
      const Cell n = move(c, static_cast<Action>(a));
      if (!in_bounds(n) || dist[cell_index(n)] >= 0) continue;
      const Tile t = level.at(n);
      if (t != Tile::kEmpty && t != Tile::kCoin) continue;
      dist[cell_index(n)] = dist[cell_index(c)] + 1;
      frontier.push_back(n);
    }
  }
  return -1;
}

Level generate_level(std::uint64_t seed) {
  Level level;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    if (try_layout(seed, attempt, level)) return level;
  }
  throw UnsatisfiableSeed("no solvable layout for seed " + std::to_string(seed));
}

ResetResult reset(const Level& level) {
  EnvState state{level, level.start, 0, Outcome::kRunning};
  Observation obs = observe(state);
  return {std::move(state), std::move(obs)};
}

StepResult step(const EnvState& state, Action action) {
  if (state.terminal()) {
    throw SteppedTerminalState("episode already ended with outcome " +
                               std::string(outcome_name(state.outcome)));
  }
  StepResult result{state, {}, 0.0, false};
  EnvState& next = result.state;
  ++next.steps_taken;

  const Cell target = move(state.agent, action);
  if (in_bounds(target) && state.level.at(target) != Tile::kWall) {
    next.agent = target;
    switch (state.level.at(target)) {
      case Tile::kHazard:
        next.outcome = Outcome::kDead;
        break;
      case Tile::kCoin:
        next.outcome = Outcome::kCoinCollected;
        result.reward = kCoinReward;
        break;
      default:
        break;
    }
  }
  if (next.outcome == Outcome::kRunning && next.steps_taken >= kMaxEpisodeSteps) {
    next.outcome = Outcome::kTimeout;
  }
  result.done = next.terminal();
  result.observation = observe(next);
  return result;
}

void observe_into(const EnvState& state, std::vector<double>& out) {
  out.assign(kObservationSize, 0.0);
  auto channel = [](Channel c) { return static_cast<int>(c) * kCells; };
  for (int i = 0; i < kCells; ++i) {
    switch (state.level.tiles[i]) {
      case Tile::kWall:
        out[channel(Channel::kWall) + i] = 1.0;
        break;
      case Tile::kHazard:
        out[channel(Channel::kHazard) + i] = 1.0;
        break;
      case Tile::kCoin:
        if (state.outcome != Outcome::kCoinCollected) {
          out[channel(Channel::kCoin) + i] = 1.0;
        }
        break;
      case Tile::kEmpty:
        break;
    }
  }
  out[channel(Channel::kAgent) + cell_index(state.agent)] = 1.0;
}

Observation observe(const EnvState& state) {
  Observation obs;
  observe_into(state, obs);
  return obs;
}

std::string to_text(const Level& level) {
  std::ostringstream os;
  os << "seed=" << level.seed << '\n';
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      const Cell c{x, y};
      char ch = '.';
      if (c == level.start) {
        ch = 'S';
      } else {
        switch (level.at(c)) {
          case Tile::kEmpty: ch = '.'; break;
          case Tile::kWall: ch = '#'; break;
          case Tile::kHazard: ch = '!'; break;
          case Tile::kCoin: ch = 'C'; break;
        }
      }
      os << ch;
    }
    os << '\n';
  }
  return os.str();
}

Level from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line.rfind("seed=", 0) != 0) {
    throw ParseError(line_no, "expected 'seed=<u64>'");
  }
  Level level;
  try {
    std::size_t consumed = 0;
    level.seed = std::stoull(line.substr(5), &consumed);
    if (consumed != line.size() - 5) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ParseError(line_no, "bad seed value '" + line.substr(5) + "'");
  }
  int starts = 0;
  int coins = 0;
  for (int y = 0; y < kHeight; ++y) {
    ++line_no;
    if (!std::getline(is, line) || static_cast<int>(line.size()) != kWidth) {
      throw ParseError(line_no, "expected a row of " + std::to_string(kWidth) +
                                    " characters");
    }
    for (int x = 0; x < kWidth; ++x) {
      Tile& tile = level.tiles[cell_index({x, y})];
      switch (line[x]) {
        case '.': tile = Tile::kEmpty; break;
        case '#': tile = Tile::kWall; break;
        case '!': tile = Tile::kHazard; break;
        case 'C':
          tile = Tile::kCoin;
          level.coin = {x, y};
          ++coins;
          break;
        case 'S':
          tile = Tile::kEmpty;
          level.start = {x, y};
          ++starts;
          break;
        default:
          throw ParseError(line_no, std::string("unknown tile '") + line[x] + "'");
      }
    }
  }
  if (starts != 1 || coins != 1) {
    throw ParseError(line_no, "level needs exactly one S and one C");
  }
  return level;
}

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::kRunning: return "RUNNING";
    case Outcome::kCoinCollected: return "COIN_COLLECTED";
    case Outcome::kDead: return "DEAD";
    case Outcome::kTimeout: return "TIMEOUT";
  }
  return "UNKNOWN";
}

}  // namespace peoc::env
