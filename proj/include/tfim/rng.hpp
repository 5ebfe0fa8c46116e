#pragma once

#include <cstdint>

namespace tfim {

// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the state is a pure function of (seed, index), so
// sample i is the same no matter how samples are batched across threads.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform draw from {0, 1, 2}. The modulo bias is 2^-63, far below any
  // statistical tolerance used here.
  int next_ternary() { return static_cast<int>(next_u64() % 3); }

 private:
  std::uint64_t state_;
};

}  // namespace tfim
