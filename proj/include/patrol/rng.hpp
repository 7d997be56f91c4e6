#pragma once
// Small deterministic RNG. splitmix64 gives us seedable, splittable streams
// without dragging in <random> engine state; substreams keyed by an index
// stay reproducible no matter how callers are scheduled.

#include <cstdint>

namespace patrol {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Independent substream i of a base seed.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed);
  std::uint64_t a = mixer.next_u64();
  SplitMix64 keyed(a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return keyed;
}

}  // namespace patrol
