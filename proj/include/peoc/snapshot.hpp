#ifndef PEOC_SNAPSHOT_HPP_
#define PEOC_SNAPSHOT_HPP_

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "peoc/nn.hpp"

namespace peoc {

enum class SnapshotTag : std::uint8_t { kAfterUpdate1, kAfterLastUpdate };

// Policy weights frozen at a named point of training.
struct PolicySnapshot {
  nn::PolicyParams params;
  SnapshotTag tag = SnapshotTag::kAfterUpdate1;
  std::uint64_t training_seed = 0;
  int update_index = 1;
};

std::string_view tag_name(SnapshotTag tag);

// Only the weights are persisted; see param_io.hpp for the container.
void save_snapshot(const std::filesystem::path& path, const PolicySnapshot& snapshot);
nn::PolicyParams load_policy_params(const std::filesystem::path& path);

}  // namespace peoc

#endif  // PEOC_SNAPSHOT_HPP_
