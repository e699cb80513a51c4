#include "peoc/peoc.hpp"

#include <algorithm>

#include "peoc/errors.hpp"
#include "peoc/param_io.hpp"

namespace peoc {

std::string_view tag_name(SnapshotTag tag) {
  switch (tag) {
    case SnapshotTag::kAfterUpdate1: return "AFTER_UPDATE_1";
    case SnapshotTag::kAfterLastUpdate: return "AFTER_LAST_UPDATE";
  }
  return "UNKNOWN";
}

void save_snapshot(const std::filesystem::path& path, const PolicySnapshot& snapshot) {
  io::save_params(path, io::kPolicyMagic, snapshot.params.values);
}

nn::PolicyParams load_policy_params(const std::filesystem::path& path) {
  nn::PolicyParams params{io::load_params(path, io::kPolicyMagic)};
  if (params.values.size() != nn::PolicyParams::layout().size()) {
    throw FormatError(path.string() + " holds " + std::to_string(params.values.size()) +
                      " parameters, expected " +
                      std::to_string(nn::PolicyParams::layout().size()));
  }
  return params;
}

double peoc_score(const PolicySnapshot& snapshot, std::span<const double> obs) {
  return nn::entropy(nn::softmax(nn::forward(snapshot.params, obs).logits));
}

Separation separation_check(std::span<const double> scores_ind,
                            std::span<const double> scores_ood) {
  if (scores_ind.empty() || scores_ood.empty()) {
    throw EmptyInput("separation_check needs scores for both sets");
  }
  const double max_ind = *std::max_element(scores_ind.begin(), scores_ind.end());
  const double min_ood = *std::min_element(scores_ood.begin(), scores_ood.end());
  return {max_ind < min_ood, min_ood - max_ind};
}

}  // namespace peoc
