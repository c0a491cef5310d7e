#pragma once

#include <cstdint>

#include "ncs/value.hpp"

namespace ncs {

// SplitMix64 step; also the seed-derivation primitive.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stream splitting rule used everywhere randomness is consumed: stream k of a
// master seed is splitmix64 applied to the master xored with a Weyl multiple
// of (k+1). Replicated runs only need the master seed and the stream index.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  uint64_t s = master ^ (0xD1B54A32D192ED03ull * (stream + 1));
  return splitmix64(s);
}

// xoshiro256** seeded through SplitMix64. Portable and fixed for the life of
// the project so that seeds written in result files stay meaningful.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased draw from [0, n).
  uint64_t bounded(uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<uint64_t>(m);
    if (low < n) {
      const uint64_t threshold = -n % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Uniform decimal on [0, 1) at full stored precision.
  Value unit_value() {
    return Value::from_units(static_cast<int64_t>(bounded(Value::kScale)));
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t state_[4];
};

}  // namespace ncs
