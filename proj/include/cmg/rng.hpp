#pragma once

#include <array>
#include <cstdint>

#include "cmg/linalg.hpp"

namespace cmg {

// splitmix64: tiny, seedable, bit-exact across platforms. All randomized
// inputs (sample points, test vectors) come from here so reports are
// reproducible from the recorded seed alone.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [-1, 1]
  double next_sym() { return 2.0 * next_unit() - 1.0; }

  Vec3 next_vec_sym() { return {next_sym(), next_sym(), next_sym()}; }
};

}  // namespace cmg
