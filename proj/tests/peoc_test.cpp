#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "peoc/errors.hpp"
#include "peoc/evalx.hpp"
#include "peoc/param_io.hpp"
#include "peoc/peoc.hpp"
#include "peoc/rng.hpp"

using namespace peoc;
using doctest::Approx;

namespace {

PolicySnapshot snapshot_of(nn::PolicyParams p) {
  return PolicySnapshot{std::move(p), SnapshotTag::kAfterUpdate1, 0, 1};
}

std::vector<double> random_obs(SplitMix64& rng) {
  std::vector<double> obs(288);
  for (double& v : obs) v = rng.uniform() < 0.1 ? 1.0 : 0.0;
  return obs;
}

}  // namespace

TEST_CASE("peoc_score: zero parameters give ln 4") {
  SplitMix64 rng(1);
  const PolicySnapshot s = snapshot_of(nn::PolicyParams::zeros());
  for (int i = 0; i < 10; ++i) CHECK(peoc_score(s, random_obs(rng)) == Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("peoc_score: a near-deterministic head gives entropy near 0") {
  nn::PolicyParams p = nn::PolicyParams::zeros();
  const nn::Layout& l = nn::PolicyParams::layout();
  const nn::LayerShape& head = l.layer(nn::PolicyParams::kPolicyHead);
  // Bias of logit 0 sits right after the head weights.
  p.values[l.offset(nn::PolicyParams::kPolicyHead) + head.weight_count()] = 1000.0;
  CHECK(nn::forward(p, std::vector<double>(288, 0.0)).logits[0] == 1000.0);
  CHECK(peoc_score(snapshot_of(p), std::vector<double>(288, 0.0)) == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("peoc_score: equals the entropy of softmax of forward, always in range") {
  SplitMix64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const nn::PolicyParams p = nn::PolicyParams::init(rng.next());
    const auto obs = random_obs(rng);
    const double h = peoc_score(snapshot_of(p), obs);
    CHECK(h == nn::entropy(nn::softmax(nn::forward(p, obs).logits)));
    CHECK(h >= 0.0);
    CHECK(h <= std::log(4.0));
  }
  CHECK_THROWS_AS(peoc_score(snapshot_of(nn::PolicyParams::zeros()), std::vector<double>(3)),
                  ShapeMismatch);
}

TEST_CASE("PeocClassifier: higher entropy means higher OOD score, no sign flip") {
  nn::PolicyParams p = nn::PolicyParams::zeros();
  const nn::Layout& l = nn::PolicyParams::layout();
  // Input 0 pushes logit 0 up strongly through the first unit of each layer.
  p.values[l.offset(0) + 0] = 1.0;
  p.values[l.offset(1) + 0] = 1.0;
  p.values[l.offset(2) + 0] = 20.0;
  std::vector<double> familiar(288, 0.0), novel(288, 0.0);
  familiar[0] = 1.0;
  const PeocClassifier clf("PEOC-1", snapshot_of(p));
  CHECK(clf.name() == "PEOC-1");
  CHECK(clf.score(novel) > clf.score(familiar));
  const auto roc = evalx::roc_curve(std::vector<evalx::ScoredSample>{{clf.score(familiar), evalx::Label::kInd, evalx::Source::kIndRun},
                                     {clf.score(novel), evalx::Label::kOod, evalx::Source::kOodRun}});
  CHECK(roc.auc == 1.0);
}

TEST_CASE("separation_check: examples") {
  const Separation a = separation_check(std::vector<double>{0.1, 0.2}, std::vector<double>{0.5, 0.9});
  CHECK(a.perfectly_separable);
  CHECK(a.margin == Approx(0.3));
  const Separation b = separation_check(std::vector<double>{0.4}, std::vector<double>{0.4});
  CHECK_FALSE(b.perfectly_separable);
  CHECK(b.margin == 0.0);
  CHECK_THROWS_AS(separation_check({}, std::vector<double>{1.0}), EmptyInput);
  CHECK_THROWS_AS(separation_check(std::vector<double>{1.0}, {}), EmptyInput);
}

TEST_CASE("separation implies AUC 1 and the point (0,1) on the ROC") {
  SplitMix64 rng(9);
  int separable_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> ind(1 + rng.below(10)), ood(1 + rng.below(10));
    const double shift = rng.uniform(-0.5, 1.0);
    for (double& v : ind) v = rng.uniform(0, 1);
    for (double& v : ood) v = rng.uniform(0, 1) + shift;
    const Separation s = separation_check(ind, ood);
    std::vector<evalx::ScoredSample> samples;
    for (double v : ind) samples.push_back({v, evalx::Label::kInd, evalx::Source::kIndRun});
    for (double v : ood) samples.push_back({v, evalx::Label::kOod, evalx::Source::kOodRun});
    const auto roc = evalx::roc_curve(samples);
    bool has_corner = false;
    for (const auto& pt : roc.points) has_corner |= pt.fpr == 0.0 && pt.tpr == 1.0;
    if (s.perfectly_separable) {
      ++separable_seen;
      CHECK(roc.auc == 1.0);
      CHECK(has_corner);
    } else {
      CHECK(roc.auc < 1.0);
    }
  }
  CHECK(separable_seen > 20);
}

TEST_CASE("snapshots round-trip through the binary container") {
  const auto dir = std::filesystem::temp_directory_path() / "peoc_snapshot_test";
  std::filesystem::create_directories(dir);
  const PolicySnapshot s{nn::PolicyParams::init(77), SnapshotTag::kAfterLastUpdate, 5, 150};
  save_snapshot(dir / "s.bin", s);
  CHECK(load_policy_params(dir / "s.bin") == s.params);
  CHECK(std::filesystem::file_size(dir / "s.bin") == 16 + 8 * s.params.values.size());
  CHECK(tag_name(SnapshotTag::kAfterUpdate1) != tag_name(SnapshotTag::kAfterLastUpdate));
  std::filesystem::remove_all(dir);
}

TEST_CASE("param container: header layout and rejection of bad input") {
  const std::string bytes = io::encode_params(io::kPolicyMagic, {1.0, -2.5});
  REQUIRE(bytes.size() == 32);
  CHECK(bytes.substr(0, 4) == "PEOC");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);
  // 1.0 is 0x3FF0000000000000, stored little-endian.
  CHECK(static_cast<unsigned char>(bytes[23]) == 0x3F);
  CHECK(static_cast<unsigned char>(bytes[22]) == 0xF0);
  CHECK(io::decode_params(io::kPolicyMagic, bytes) == std::vector<double>{1.0, -2.5});
  CHECK_THROWS_AS(io::decode_params(io::kAutoencoderMagic, bytes), FormatError);
  CHECK_THROWS_AS(io::decode_params(io::kPolicyMagic, bytes.substr(0, 30)), FormatError);
  std::string bad_version = bytes;
  bad_version[4] = 2;
  CHECK_THROWS_AS(io::decode_params(io::kPolicyMagic, bad_version), FormatError);
}
