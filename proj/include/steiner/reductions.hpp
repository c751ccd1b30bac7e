#pragma once
/**
 * Hardness gadgets: terminals on two horizontal lines, lifted to fixed-line
 * and free-line instances whose optimum is known in terms of the original
 * Steiner tree optimum.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "steiner/geometry.hpp"

namespace steiner {

/// Terminals on y = 0 and y = h, all coordinates non-negative, (0, 0) first.
struct PalimestInstance {
  std::vector<Point> terminals;
  double h{};
  std::uint64_t seed{};
  double width{};

  /// Empty when the invariants hold.
  std::vector<std::string> check() const;
};

/// Deterministic by seed: (0, 0), then n_bottom - 1 points on y = 0 and
/// n_top on y = h, x uniform in [0, width]. Throws InvalidArgument for
/// n_bottom < 1, h <= 0, negative width, or width 0 with several points on a line.
PalimestInstance gen_palimest(std::uint64_t seed, std::size_t n_bottom, std::size_t n_top, double width,
                              double h);

struct EsflGadget {
  Instance instance;  // terminals with the line x + y = -2M
  double m{};         // Euclidean MST length of the terminals
  double expected_offset{};  // sqrt(2) M
};

/// M = 0 (a single terminal) gives the line x + y = 0 and offset 0.
EsflGadget reduce_to_esfl(const PalimestInstance& p);

struct EslGadget {
  std::vector<Point> terminals;  // input terminals, then p and q
  Point p, q;                    // (-5M, 3M) and (3M, -5M)
  LineSpec expected_line = LineSpec::horizontal(0.0);  // x + y = -2M
  double m{};
  double expected_offset{};
};

/// Throws DegenerateM when M = 0.
EslGadget reduce_to_esl(const PalimestInstance& p);

struct Observation1Report {
  std::size_t samples{};
  double range{};
  double min_g{};
  double argmin{};
  bool positive{};
};

/// g(a) = |5a + 3| + |3a + 5| - (5/2) sqrt(a^2 + 1).
double observation1_g(double a);

/// Minimum of g over `samples` uniform points in [-range, range] and the
/// breakpoints -5/3 and -3/5.
Observation1Report check_observation1(std::size_t samples, double range, std::uint64_t seed = 0);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::uint64_t bits);

}  // namespace steiner
