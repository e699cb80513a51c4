#ifndef PEOC_PEOC_HPP_
#define PEOC_PEOC_HPP_

// Policy-entropy out-of-distribution classifier. The score of a state is the
// entropy of the action distribution a stored policy assigns to it: a policy
// trained to act well becomes confident on familiar states, so high entropy
// hints at an unfamiliar one.

#include <span>
#include <string>
#include <vector>

#include "peoc/snapshot.hpp"

namespace peoc {

// One-class OOD scorer. Higher scores mean "more out-of-distribution".
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual const std::string& name() const = 0;
  virtual double score(std::span<const double> obs) const = 0;
};

// Entropy of softmax(forward(params, obs)) in nats, in [0, ln 4].
double peoc_score(const PolicySnapshot& snapshot, std::span<const double> obs);

class PeocClassifier final : public Classifier {
 public:
  PeocClassifier(std::string name, PolicySnapshot snapshot)
      : name_(std::move(name)), snapshot_(std::move(snapshot)) {}

  const std::string& name() const override { return name_; }
  double score(std::span<const double> obs) const override {
    return peoc_score(snapshot_, obs);
  }
  const PolicySnapshot& snapshot() const { return snapshot_; }

 private:
  std::string name_;
  PolicySnapshot snapshot_;
};

struct Separation {
  bool perfectly_separable = false;
  double margin = 0.0;  // min(ood) - max(ind)
};

// Strict separation: every in-distribution score lies below every OOD score.
// Throws EmptyInput.
Separation separation_check(std::span<const double> scores_ind,
                            std::span<const double> scores_ood);

}  // namespace peoc

#endif  // PEOC_PEOC_HPP_
