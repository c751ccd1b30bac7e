#include <doctest.h>

#include <cmath>

#include "steiner/error.hpp"
#include "steiner/geometry.hpp"
#include "steiner/oracles.hpp"
#include "steiner/steiner_graph.hpp"

using namespace steiner;

TEST_SUITE("geometry") {

TEST_CASE("points reject non-finite coordinates") {
  CHECK_THROWS_AS(Point(NAN, 0.0), Error);
  CHECK_THROWS_AS(Point(0.0, INFINITY), Error);
  CHECK_NOTHROW(Point(-1e300, 1e300));
}

TEST_CASE("line normalization") {
  const LineSpec l(2.0, 2.0, -4.0);
  CHECK(l.a() == doctest::Approx(std::sqrt(0.5)));
  CHECK(l.b() == doctest::Approx(std::sqrt(0.5)));
  CHECK(l.c() == doctest::Approx(-4.0 / std::sqrt(8.0)));
  // Scaling and sign flips describe the same line.
  CHECK(LineSpec(-3.0, -3.0, 6.0).approx_equal(l, 1e-15));
  CHECK(LineSpec(0.0, -2.0, 1.0) == LineSpec(0.0, 1.0, -0.5));
  CHECK_THROWS_AS(LineSpec(0.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(LineSpec(1.0, NAN, 1.0), Error);
}

TEST_CASE("point to line distance") {
  const double m = 1.0;
  CHECK(point_line_distance({0, 0}, LineSpec(1, 1, -2 * m)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(point_line_distance({3, -5}, LineSpec(1, 1, -2)) == 0.0);
  const double d = point_line_distance({-5, 3}, LineSpec(1, -1, 0));
  CHECK(d == doctest::Approx(8.0 / std::sqrt(2.0)).epsilon(1e-15));
  // Independent check: closest sampled point on y = x.
  double best = 1e300;
  for (int i = -100000; i <= 100000; ++i) {
    const double t = i * 1e-4;
    best = std::min(best, std::hypot(-5 - t, 3 - t));
  }
  CHECK(std::abs(best - d) < 1e-6);
  // Invariant under rescaling before normalization.
  CHECK(point_line_distance({1.5, 2}, LineSpec(3, 4, 5)) ==
        doctest::Approx(point_line_distance({1.5, 2}, LineSpec(30, 40, 50))).epsilon(1e-15));
}

TEST_CASE("width and height") {
  const std::vector<Point> a{{0, 1}, {3, 2}};
  CHECK(width(a) == 3.0);
  CHECK(height(a) == 2.0);
  const std::vector<Point> b{{-1, 0.5}, {4, 0.2}, {2, 7}};
  CHECK(width(b) == 5.0);
  CHECK(height(b) == 7.0);
  const std::vector<Point> one{{2, 2}};
  CHECK(width(one) == 0.0);
  CHECK_THROWS_AS(width(std::vector<Point>{}), Error);
  CHECK_THROWS_AS(height(std::vector<Point>{}), Error);
}

TEST_CASE("instances reject duplicates and empty sets") {
  CHECK_THROWS_AS(Instance(std::vector<Point>{}), Error);
  CHECK_THROWS_AS(Instance({{0, 0}, {1, 1}, {0, 0}}), Error);
}

TEST_CASE("canonicalize: identity on the canonical frame") {
  const Instance inst({{0, 1}, {2, 3}}, LineSpec::horizontal(0.0));
  const Canonicalization c = canonicalize(inst);
  REQUIRE(c.sides.size() == 1);
  CHECK(c.sides[0].to_canonical.is_identity(1e-15));
  CHECK(c.sides[0].instance.terminals == inst.terminals);
  CHECK_THROWS_AS(canonicalize(Instance({{0, 1}})), Error);
}

TEST_CASE("canonicalize: rigid, and costs carry over") {
  const Instance inst({{1, 1}, {-0.5, 2}, {3, -0.5}}, LineSpec(1, 1, -2));
  const Canonicalization c = canonicalize(inst);
  REQUIRE(c.sides.size() == 1);
  const auto& side = c.sides[0];
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Point& p = side.instance.terminals[i];
    CHECK(p.y > 0.0);
    CHECK(p.y == doctest::Approx(point_line_distance(inst.terminals[side.original_index[i]], *inst.line)));
    CHECK(approx_equal(side.to_canonical.inverse(p).x, inst.terminals[side.original_index[i]].x, 1e-12));
    for (std::size_t j = 0; j < inst.size(); ++j) {
      CHECK(distance(p, side.instance.terminals[j]) ==
            doctest::Approx(distance(inst.terminals[side.original_index[i]],
                                     inst.terminals[side.original_index[j]])));
    }
  }
  CHECK(solve_esfl_exact(inst).cost == doctest::Approx(solve_esfl_exact(side.instance).cost).epsilon(1e-9));
}

TEST_CASE("canonicalize: sides split and on-line terminals are recorded") {
  const Instance inst({{0, 1}, {1, -2}, {2, 0}, {3, 0.5}}, LineSpec::horizontal(0.0));
  const Canonicalization c = canonicalize(inst);
  REQUIRE(c.sides.size() == 2);
  CHECK(c.sides[0].original_index == std::vector<std::size_t>{0, 3});
  CHECK(c.sides[1].original_index == std::vector<std::size_t>{1});
  CHECK(c.sides[1].to_canonical.is_reflection());
  CHECK(c.sides[1].instance.terminals[0].y == doctest::Approx(2.0));
  CHECK(c.on_line == std::vector<std::size_t>{2});

  // Straddling instance: side optima add up to the whole.
  const Instance s({{0, 1}, {0.7, -0.6}, {1.2, 0.8}}, LineSpec(0.1, 1, 0));
  const auto cs = canonicalize(s);
  double sum = 0.0;
  for (const auto& side : cs.sides) sum += solve_esfl_exact(side.instance).cost;
  CHECK(sum == doctest::Approx(solve_esfl_exact(s).cost).epsilon(1e-12));
}

TEST_CASE("fermat point") {
  const Point a{0, 0}, b{1, 0}, c{0.5, std::sqrt(3.0) / 2};
  const Point f = fermat_point(a, b, c);
  CHECK(f.x == doctest::Approx(0.5));
  CHECK(f.y == doctest::Approx(std::sqrt(3.0) / 6));
  // Obtuse vertex wins at 120 degrees or more.
  CHECK(fermat_point({0, 0}, {1, 0}, {-0.6, 0.1}) == Point(0, 0));
  CHECK(fermat_point({0, 0}, {0, 0}, {1, 1}) == Point(0, 0));
}

TEST_CASE("steiner conditions") {
  SteinerGraph g;
  const double h = std::sqrt(3.0) / 2;
  const int a = g.add_node(NodeKind::Terminal, {0, 0}, 0);
  const int b = g.add_node(NodeKind::Terminal, {1, 0}, 1);
  const int c = g.add_node(NodeKind::Terminal, {0.5, h}, 2);
  const int s = g.add_node(NodeKind::Steiner, {0.5, h / 3});
  g.add_edge(a, s);
  g.add_edge(b, s);
  g.add_edge(c, s);
  CHECK(validate_steiner_conditions(g).ok());

  SteinerGraph pair;
  pair.add_edge(pair.add_node(NodeKind::Terminal, {0, 0}, 0), pair.add_node(NodeKind::Terminal, {3, 4}, 1));
  CHECK(validate_steiner_conditions(pair).ok());

  SteinerGraph deg2;
  const int u = deg2.add_node(NodeKind::Terminal, {0, 0}, 0);
  const int v = deg2.add_node(NodeKind::Terminal, {2, 0}, 1);
  const int w = deg2.add_node(NodeKind::Steiner, {1, 0});
  deg2.add_edge(u, w);
  deg2.add_edge(w, v);
  const ConditionReport r = validate_steiner_conditions(deg2);
  CHECK(r.count(ConditionViolation::Kind::Degree) == 1);

  SteinerGraph slanted(LineSpec::horizontal(0.0));
  const int t = slanted.add_node(NodeKind::Terminal, {0, 1}, 0);
  slanted.add_line_node();
  slanted.add_line_edge(t, {0.5, 0});
  CHECK(validate_steiner_conditions(slanted).count(ConditionViolation::Kind::Perpendicular) == 1);
}

}  // TEST_SUITE
