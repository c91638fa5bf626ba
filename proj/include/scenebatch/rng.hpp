#pragma once

#include <cstdint>
#include <initializer_list>

namespace scenebatch {

// splitmix64 finalizer; good avalanche, used to derive stream keys.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds an arbitrary tuple of counters into one stream key. Order-sensitive.
inline uint64_t stream_key(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x853c49e6748fea9bULL;
  for (uint64_t p : parts) h = mix64(h ^ p);
  return h;
}

// PCG-XSH-RR 64/32. Deterministic, O(1) seekable streams via stream_key.
class Pcg32 {
 public:
  explicit Pcg32(uint64_t seed, uint64_t seq = 0xda3e39cb94b95bdbULL)
      : state_(0), inc_((seq << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  uint64_t next_u64() {
    return (static_cast<uint64_t>(next_u32()) << 32) | next_u32();
  }

  // [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // [0, n)
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
  }

 private:
  uint64_t state_;
  uint64_t inc_;
};

// Per-instance stream: schedule-independent randomness for batched loops.
inline Pcg32 make_stream(uint64_t seed, std::initializer_list<uint64_t> counters) {
  uint64_t h = mix64(seed);
  for (uint64_t c : counters) h = mix64(h ^ c);
  return Pcg32(h);
}

}  // namespace scenebatch
