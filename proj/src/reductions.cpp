#include "steiner/reductions.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "steiner/error.hpp"
#include "steiner/est.hpp"

namespace steiner {

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<std::string> PalimestInstance::check() const {
  std::vector<std::string> out;
  if (!(h > 0.0)) out.emplace_back("h must be positive");
  if (std::find(terminals.begin(), terminals.end(), Point(0.0, 0.0)) == terminals.end()) {
    out.emplace_back("(0, 0) missing");
  }
  for (const auto& t : terminals) {
    if (t.x < 0.0 || t.y < 0.0) out.emplace_back("negative coordinate");
    if (t.y != 0.0 && t.y != h) out.emplace_back("terminal off both lines");
  }
  return out;
}

PalimestInstance gen_palimest(std::uint64_t seed, std::size_t n_bottom, std::size_t n_top, double width,
                              double h) {
  if (n_bottom < 1) throw Error(ErrorCode::InvalidArgument, "need at least the origin on y = 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  if (!(width >= 0.0) || !std::isfinite(width)) throw Error(ErrorCode::InvalidArgument, "width must be >= 0");
  if (width == 0.0 && (n_bottom > 1 || n_top > 1)) {
    throw Error(ErrorCode::InvalidArgument, "zero width leaves no room for distinct points");
  }
  std::mt19937_64 rng(seed);
  PalimestInstance p;
  p.h = h;
  p.seed = seed;
  p.width = width;
  p.terminals.emplace_back(0.0, 0.0);
  auto draw = [&](double y) {
    while (true) {
      const Point c(width * unit_uniform(rng()), y);
      if (std::find(p.terminals.begin(), p.terminals.end(), c) == p.terminals.end()) return c;
    }
  };
  for (std::size_t i = 1; i < n_bottom; ++i) p.terminals.push_back(draw(0.0));
  for (std::size_t i = 0; i < n_top; ++i) p.terminals.push_back(draw(h));
  return p;
}

EsflGadget reduce_to_esfl(const PalimestInstance& p) {
  EsflGadget g;
  g.m = mst_length(p.terminals);
  g.instance = Instance(p.terminals, LineSpec(1.0, 1.0, -2.0 * g.m));
  g.expected_offset = std::numbers::sqrt2 * g.m;
  return g;
}

EslGadget reduce_to_esl(const PalimestInstance& p) {
  EslGadget g;
  g.m = mst_length(p.terminals);
  if (g.m == 0.0) throw Error(ErrorCode::DegenerateM, "MST length is zero");
  g.p = Point(-5.0 * g.m, 3.0 * g.m);
  g.q = Point(3.0 * g.m, -5.0 * g.m);
  g.terminals = p.terminals;
  g.terminals.push_back(g.p);
  g.terminals.push_back(g.q);
  g.expected_line = LineSpec(1.0, 1.0, -2.0 * g.m);
  g.expected_offset = std::numbers::sqrt2 * g.m;
  return g;
}

double observation1_g(double a) {
  return std::abs(5.0 * a + 3.0) + std::abs(3.0 * a + 5.0) - 2.5 * std::sqrt(a * a + 1.0);
}

Observation1Report check_observation1(std::size_t samples, double range, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  if (!(range > 0.0) || !std::isfinite(range)) throw Error(ErrorCode::InvalidArgument, "range must be positive");
  Observation1Report r;
  r.samples = samples;
  r.range = range;
  r.argmin = -5.0 / 3.0;
  r.min_g = observation1_g(r.argmin);
  auto consider = [&](double a) {
    const double g = observation1_g(a);
    if (g < r.min_g) {
      r.min_g = g;
      r.argmin = a;
    }
  };
  consider(-3.0 / 5.0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) consider(range * (2.0 * unit_uniform(rng()) - 1.0));
  r.positive = r.min_g > 0.0;
  return r;
}

}  // namespace steiner
