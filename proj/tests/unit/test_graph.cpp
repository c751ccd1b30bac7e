#include <doctest.h>

#include <cmath>

#include "steiner/error.hpp"
#include "steiner/steiner_graph.hpp"

using namespace steiner;

TEST_SUITE("graph") {

TEST_CASE("edges are priced by their geometry") {
  SteinerGraph g(LineSpec::horizontal(0.0));
  const int a = g.add_node(NodeKind::Terminal, {0, 2}, 0);
  const int b = g.add_node(NodeKind::Terminal, {3, 6}, 1);
  g.add_line_node();
  g.add_edge(a, b);
  g.add_perpendicular_edge(a);
  CHECK(g.total_cost() == doctest::Approx(7.0));
  CHECK(g.is_tree());
  CHECK(g.validate().empty());
  CHECK(g.edges()[1].attachment == Point(0, 0));
  CHECK(g.count(NodeKind::Terminal) == 2);
}

TEST_CASE("validate catches broken invariants") {
  SteinerGraph g;
  const int a = g.add_node(NodeKind::Terminal, {0, 0}, 0);
  const int b = g.add_node(NodeKind::Terminal, {1, 0}, 1);
  g.add_raw_edge(Edge{a, b, 2.0, std::nullopt});
  CHECK_FALSE(g.validate().empty());

  SteinerGraph cyc;
  const int p = cyc.add_node(NodeKind::Terminal, {0, 0}, 0);
  const int q = cyc.add_node(NodeKind::Terminal, {1, 0}, 1);
  const int r = cyc.add_node(NodeKind::Terminal, {0, 1}, 2);
  cyc.add_edge(p, q);
  cyc.add_edge(q, r);
  cyc.add_edge(r, p);
  CHECK_FALSE(cyc.is_tree());
  CHECK_FALSE(cyc.validate().empty());
}

TEST_CASE("only one line node") {
  SteinerGraph g(LineSpec::horizontal(0.0));
  g.add_line_node();
  CHECK_THROWS_AS(g.add_line_node(), Error);
  SteinerGraph none;
  CHECK_THROWS_AS(none.add_line_node(), Error);
}

TEST_CASE("node kinds round-trip through strings") {
  for (auto k : {NodeKind::Terminal, NodeKind::Steiner, NodeKind::LinePoint, NodeKind::LineNode}) {
    CHECK(node_kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(node_kind_from_string("vertex").has_value());
}

}  // TEST_SUITE
