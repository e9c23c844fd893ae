#pragma once

#include <cstdint>

namespace betacoal {

// SplitMix64 with a per-stream odd increment. Each replicate gets its own
// stream derived from (seed, replicate_index), so replicates produce
// identical draws regardless of scheduling order or worker-thread count.
class SplitMix64 {
public:
  SplitMix64(uint64_t state, uint64_t increment)
      : state_(state), increment_(increment | 1ULL) {}

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 replicate_stream(uint64_t seed, uint64_t index) {
    const uint64_t state = mix(seed ^ mix(0x9E3779B97F4A7C15ULL * (index + 1)));
    const uint64_t inc = mix(index ^ mix(seed + 0xBF58476D1CE4E5B9ULL));
    return SplitMix64(state, inc);
  }

  uint64_t next() {
    state_ += increment_;
    return mix(state_);
  }

  // strictly inside (0,1): 52 random mantissa bits plus a half-step offset
  double uniform_open01() {
    return (double(next() >> 12) + 0.5) * 0x1p-52;
  }

private:
  uint64_t state_;
  uint64_t increment_;
};

} // namespace betacoal
