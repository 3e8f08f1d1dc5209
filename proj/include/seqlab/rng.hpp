#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace seqlab {

// Deterministic PRNG used for every initialization, sampling and shuffling
// decision in the project. Built on std::mt19937_64, whose output sequence is
// pinned by the C++ standard, with hand-rolled value mappings so that results
// do not depend on the standard library's unspecified distribution
// implementations. Same seed, same platform: bit-identical runs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 bits of randomness.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). Modulo bias is below 2^-53 for any n that fits
  // in memory, which is far under reproducibility-relevant thresholds.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  // Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace seqlab
