// SPDX-License-Identifier: Apache-2.0

#ifndef MECHLAB_RNG_H_
#define MECHLAB_RNG_H_

#include <cstdint>
#include <span>
#include <utility>

namespace mechlab {

// Counter-based SplitMix64: output i of stream (seed, stream) is the
// SplitMix64 finalizer applied to key + (i + 1) * gamma, where key mixes the
// seed and the stream index. Streams are independent of evaluation order,
// which is what lets Monte Carlo samples run in any order or in parallel.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(Mix(Mix(seed) ^ (stream * kGamma + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t Next() { return Mix(key_ + (++counter_) * kGamma); }

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = Next();
    while (x >= limit) x = Next();
    return x % bound;
  }

  static constexpr std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates with CounterRng draws.
template <typename T>
void Shuffle(std::span<T> values, CounterRng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.Below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace mechlab

#endif  // MECHLAB_RNG_H_
