#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "steiner/geometry.hpp"
#include "steiner/reductions.hpp"

namespace testing {

/// Distinct points in [0, 1] x [y_lo, y_hi].
inline std::vector<steiner::Point> random_points(std::mt19937_64& rng, std::size_t n, double y_lo = 0.0,
                                                 double y_hi = 1.0) {
  std::vector<steiner::Point> pts;
  while (pts.size() < n) {
    const steiner::Point p(steiner::unit_uniform(rng()), y_lo + (y_hi - y_lo) * steiner::unit_uniform(rng()));
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }
  return pts;
}

}  // namespace testing
