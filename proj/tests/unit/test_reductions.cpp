#include <doctest.h>

#include <cmath>

#include "steiner/error.hpp"
#include "steiner/est.hpp"
#include "steiner/oracles.hpp"
#include "steiner/reductions.hpp"

using namespace steiner;

TEST_SUITE("reductions") {

TEST_CASE("generator snapshot") {
  const PalimestInstance p = gen_palimest(42, 3, 2, 2.0, 0.75);
  const std::vector<Point> expected{{0, 0},
                                    {1.510311065909078, 0},
                                    {1.2780627877093949, 0},
                                    {1.5042904014960532, 0.75},
                                    {0.2725453672648741, 0.75}};
  CHECK(p.terminals == expected);
  CHECK(p.check().empty());
  CHECK(gen_palimest(42, 3, 2, 2.0, 0.75).terminals == p.terminals);
  CHECK(gen_palimest(43, 3, 2, 2.0, 0.75).terminals != p.terminals);
  CHECK(unit_uniform(0) == 0.0);
  CHECK(unit_uniform(~0ULL) < 1.0);
}

TEST_CASE("generator invariants and errors") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PalimestInstance p = gen_palimest(seed, 1 + seed % 4, seed % 3, 1.0 + static_cast<double>(seed % 5), 0.5);
    CHECK(p.check().empty());
    CHECK(p.terminals.front() == Point(0, 0));
  }
  CHECK_THROWS_AS(gen_palimest(1, 0, 2, 1.0, 1.0), Error);
  CHECK_THROWS_AS(gen_palimest(1, 2, 2, 1.0, 0.0), Error);
  CHECK_THROWS_AS(gen_palimest(1, 2, 2, -1.0, 1.0), Error);
  CHECK_THROWS_AS(gen_palimest(1, 2, 0, 0.0, 1.0), Error);
  CHECK(gen_palimest(1, 1, 1, 0.0, 1.0).terminals.size() == 2);

  PalimestInstance bad = gen_palimest(1, 2, 1, 1.0, 1.0);
  bad.terminals.push_back({0.5, 0.5});
  CHECK(!bad.check().empty());
}

TEST_CASE("fixed line gadget") {
  PalimestInstance p;
  p.terminals = {{0, 0}, {3, 0}};
  p.h = 1.0;
  const EsflGadget g = reduce_to_esfl(p);
  CHECK(g.m == 3.0);
  CHECK(g.instance.line == LineSpec(1, 1, -6));
  CHECK(g.expected_offset == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(g.instance.terminals == p.terminals);

  PalimestInstance single;
  single.terminals = {{0, 0}};
  single.h = 1.0;
  const EsflGadget s = reduce_to_esfl(single);
  CHECK(s.m == 0.0);
  CHECK(s.expected_offset == 0.0);
  CHECK(s.instance.line == LineSpec(1, 1, 0));
}

TEST_CASE("fixed line gadget optimum") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PalimestInstance p = gen_palimest(seed, 2 + seed % 3, 1 + seed % 2, 2.0, 0.75);
    const EsflGadget g = reduce_to_esfl(p);
    const double est = solve_exact(p.terminals).cost;
    const EsflSolution s = solve_esfl_exact(g.instance);
    CHECK(s.cost == doctest::Approx(est + g.expected_offset).epsilon(1e-10));
    CHECK(est < std::sqrt(2.0) * g.m);
    std::size_t line_edges = 0;
    for (const auto& e : s.graph.edges()) {
      if (e.attachment) ++line_edges;
    }
    CHECK(line_edges == 1);
  }
}

TEST_CASE("free line gadget") {
  PalimestInstance p;
  p.terminals = {{0, 0}, {3, 0}};
  p.h = 1.0;
  const EslGadget g = reduce_to_esl(p);
  CHECK(g.p == Point(-15, 9));
  CHECK(g.q == Point(9, -15));
  CHECK(g.expected_line == LineSpec(1, 1, -6));
  CHECK(g.terminals.size() == 4);

  PalimestInstance single;
  single.terminals = {{0, 0}};
  single.h = 1.0;
  CHECK_THROWS_AS(reduce_to_esl(single), Error);
}

TEST_CASE("free line gadget optimum") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const PalimestInstance p = gen_palimest(seed, 2, 1, 2.0, 0.75);
    const EslGadget g = reduce_to_esl(p);
    const EslSolution s = solve_esl_exact(g.terminals);
    CHECK(s.line.approx_equal(g.expected_line, 1e-9));
    CHECK(s.cost == doctest::Approx(solve_exact(p.terminals).cost + g.expected_offset).epsilon(1e-10));
  }
}

TEST_CASE("gadget inequality g(a) > 0") {
  CHECK(observation1_g(-5.0 / 3.0) == doctest::Approx(16.0 / 3.0 - 2.5 * std::sqrt(34.0) / 3.0));
  CHECK(observation1_g(-0.6) == doctest::Approx(0.284524).epsilon(1e-5));
  CHECK(observation1_g(0.0) == doctest::Approx(5.5));
  const Observation1Report r = check_observation1(100000, 100.0, 1);
  CHECK(r.positive);
  CHECK(r.min_g > 0.28);
  CHECK(r.argmin == doctest::Approx(-0.6));
  CHECK(r.samples >= 100000);
}

}  // TEST_SUITE
