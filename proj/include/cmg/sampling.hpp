#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cmg/errors.hpp"
#include "cmg/linalg.hpp"
#include "cmg/rng.hpp"

namespace cmg::verify {

// Where a structure lives and how checks sample it. Sampling is fully
// deterministic: a grid never depends on anything but its dims, and the
// quasi-random strategy is a pure function of (seed, count).
struct SampleDomain {
  std::array<std::pair<double, double>, 3> bounds{
      {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
  std::array<std::optional<double>, 3> periods{};  // period length per axis, if periodic

  enum class Strategy { Grid, QuasiRandom };
  Strategy strategy = Strategy::Grid;
  std::array<int, 3> grid_dims{8, 8, 16};
  int random_count = 200;
  std::uint64_t seed = 7;

  bool periodic(int axis) const { return periods[axis].has_value(); }
};

// Grid covers the box uniformly. On a periodic axis the far endpoint is the
// seam duplicate of the near one and is excluded; on a bounded axis both
// endpoints are included.
inline std::vector<Vec3> sample_points(const SampleDomain& d) {
  if (d.strategy == SampleDomain::Strategy::QuasiRandom) {
    if (d.random_count < 1) throw StructureError("sample_points: count must be >= 1");
    SplitMix64 rng(d.seed);
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(d.random_count));
    for (int n = 0; n < d.random_count; ++n) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) {
        auto [lo, hi] = d.bounds[a];
        p[a] = lo + (hi - lo) * rng.next_unit();
      }
      pts.push_back(p);
    }
    return pts;
  }

  for (int a = 0; a < 3; ++a)
    if (d.grid_dims[a] < 1) throw StructureError("sample_points: grid dims must be >= 1");

  std::array<std::vector<double>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    auto [lo, hi] = d.bounds[a];
    int n = d.grid_dims[a];
    auto& ax = axes[a];
    ax.reserve(static_cast<std::size_t>(n));
    if (d.periodic(a)) {
      for (int k = 0; k < n; ++k) ax.push_back(lo + (hi - lo) * k / n);
    } else if (n == 1) {
      ax.push_back(0.5 * (lo + hi));
    } else {
      for (int k = 0; k < n; ++k) ax.push_back(lo + (hi - lo) * k / (n - 1));
    }
  }

  std::vector<Vec3> pts;
  pts.reserve(axes[0].size() * axes[1].size() * axes[2].size());
  for (double x : axes[0])
    for (double y : axes[1])
      for (double z : axes[2]) pts.push_back({x, y, z});
  return pts;
}

inline std::vector<Vec3> sample_points(const SampleDomain& d, int count, std::uint64_t seed) {
  SampleDomain q = d;
  q.strategy = SampleDomain::Strategy::QuasiRandom;
  q.random_count = count;
  q.seed = seed;
  return sample_points(q);
}

}  // namespace cmg::verify

namespace cmg {
using verify::sample_points;
using verify::SampleDomain;
}  // namespace cmg
