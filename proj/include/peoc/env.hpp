#ifndef PEOC_ENV_HPP_
#define PEOC_ENV_HPP_

// CorridorWorld: a seed-deterministic procedural gridworld. The agent starts
// in the bottom-left corner and has to reach the coin in the bottom-right
// corner. Vertical wall segments with a single gap and a few hazard cells
// lie in between. Reaching the coin pays 10, everything else pays 0.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace peoc::env {

inline constexpr int kWidth = 12;
inline constexpr int kHeight = 6;
inline constexpr int kCells = kWidth * kHeight;
inline constexpr int kChannels = 4;
inline constexpr int kObservationSize = kCells * kChannels;  // 288
inline constexpr int kNumActions = 4;
inline constexpr int kMaxEpisodeSteps = 200;
inline constexpr double kCoinReward = 10.0;
inline constexpr int kMaxGenerationAttempts = 1000;

enum class Tile : std::uint8_t { kEmpty, kWall, kHazard, kCoin };

enum class Action : std::uint8_t { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

enum class Outcome : std::uint8_t { kRunning, kCoinCollected, kDead, kTimeout };

// Observation channels, stored planar: index = channel * kCells + y * kWidth + x.
enum class Channel : int { kWall = 0, kHazard = 1, kCoin = 2, kAgent = 3 };

struct Cell {
  int x = 0;
  int y = 0;  // row 0 is the top row
  friend bool operator==(const Cell&, const Cell&) = default;
};

constexpr bool in_bounds(Cell c) {
  return c.x >= 0 && c.x < kWidth && c.y >= 0 && c.y < kHeight;
}

constexpr int cell_index(Cell c) { return c.y * kWidth + c.x; }

struct Level {
  std::uint64_t seed = 0;
  std::array<Tile, kCells> tiles{};
  Cell start{0, kHeight - 1};
  Cell coin{kWidth - 1, kHeight - 1};

  Tile at(Cell c) const { return tiles[cell_index(c)]; }
  friend bool operator==(const Level&, const Level&) = default;
};

using Observation = std::vector<double>;

struct EnvState {
  Level level;
  Cell agent;
  int steps_taken = 0;
  Outcome outcome = Outcome::kRunning;

  bool terminal() const { return outcome != Outcome::kRunning; }
  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct ResetResult {
  EnvState state;
  Observation observation;
};

struct StepResult {
  EnvState state;
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

// Builds the level for a seed. Throws UnsatisfiableSeed if no solvable layout
// is found within kMaxGenerationAttempts attempts.
Level generate_level(std::uint64_t seed);

ResetResult reset(const Level& level);

// Throws SteppedTerminalState when `state` is already terminal.
StepResult step(const EnvState& state, Action action);

Observation observe(const EnvState& state);

// Writes the one-hot encoding into `out` (size kObservationSize) without
// allocating.
void observe_into(const EnvState& state, std::vector<double>& out);

// Length of the shortest 4-connected path over non-wall, non-hazard cells
// from start to coin, or -1 when the coin is unreachable.
int shortest_path_length(const Level& level);

Cell move(Cell from, Action action);

// Text form: "seed=<u64>" then kHeight rows of kWidth characters from
// ". # ! C S" (empty, wall, hazard, coin, start).
std::string to_text(const Level& level);
Level from_text(std::string_view text);

std::string_view outcome_name(Outcome outcome);

}  // namespace peoc::env

#endif  // PEOC_ENV_HPP_
