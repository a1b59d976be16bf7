#pragma once

#include <array>
#include <cstdint>

namespace ecp {

// splitmix64 step (Steele, Lea & Flood; Vigna's reference constants).
// Advances the state and returns one mixed output word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Substream seed for a given (master seed, stream index) pair. Streams are
// independent of evaluation order, so trials can be partitioned across
// workers and merged deterministically.
inline std::uint64_t derive_substream_seed(std::uint64_t seed,
                                           std::uint64_t index) noexcept {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  return splitmix64_next(s);
}

// xoshiro256** 1.0 (Blackman & Vigna, 2018). State is seeded through
// splitmix64 as the authors recommend. Fully portable: no platform
// dependence beyond 64-bit unsigned arithmetic.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return (next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace ecp
