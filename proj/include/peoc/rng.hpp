#ifndef PEOC_RNG_HPP_
#define PEOC_RNG_HPP_

#include <cstdint>
#include <utility>

namespace peoc {

// SplitMix64 finalizer. A bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// splitmix64 stream. Every random draw in the project goes through this
// generator so results are bit-identical across platforms and compilers.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // draw mod n; n must be positive.
  constexpr std::uint64_t below(std::uint64_t n) { return next() % n; }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Deterministic Fisher-Yates shuffle.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, SplitMix64& rng) {
  auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace peoc

#endif  // PEOC_RNG_HPP_
