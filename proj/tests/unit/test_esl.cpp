#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "steiner/error.hpp"
#include "steiner/esl.hpp"
#include "steiner/oracles.hpp"

using namespace steiner;

TEST_SUITE("esl") {

TEST_CASE("candidate lines") {
  const std::vector<Point> tri{{0, 0}, {1, 0}, {0, 1}};
  const auto c = candidate_lines(tri);
  CHECK(c.size() == 3);
  CHECK(c[0].line == LineSpec::horizontal(0.0));
  CHECK(c[0].pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});

  const std::vector<Point> row{{0, 0}, {1, 0}, {2, 0}, {1, 1}};
  const auto r = candidate_lines(row);
  CHECK(r.size() == 4);
  CHECK(r[0].pairs.size() == 3);

  const std::vector<Point> one{{3, 4}};
  const auto s = candidate_lines(one);
  REQUIRE(s.size() == 1);
  CHECK(s[0].line == LineSpec::horizontal(4.0));
  CHECK(s[0].pairs.empty());

  CHECK_THROWS_AS(candidate_lines(std::vector<Point>{}), Error);

  std::mt19937_64 rng(3);
  const auto pts = testing::random_points(rng, 7);
  const auto many = candidate_lines(pts);
  CHECK(many.size() == 21);
  for (const auto& cand : many) {
    for (auto [i, j] : cand.pairs) {
      CHECK(i < j);
      CHECK(point_line_distance(pts[i], cand.line) < 1e-12);
      CHECK(point_line_distance(pts[j], cand.line) < 1e-12);
    }
  }
}

TEST_CASE("small examples") {
  const std::vector<Point> one{{3, 4}};
  const EslSolution s = solve_esl(one);
  CHECK(s.cost == 0.0);
  CHECK(!s.pair);

  const std::vector<Point> two{{0, 0}, {5, 1}};
  CHECK(solve_esl(two).cost == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<Point> tri{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const EslSolution t = solve_esl(tri);
  CHECK(t.cost == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(t.candidates == 3);
  REQUIRE(t.pair);
  CHECK(point_line_distance(tri[t.pair->first], t.line) < 1e-12);
  CHECK(point_line_distance(tri[t.pair->second], t.line) < 1e-12);
  CHECK(t.esfl.graph.line() == t.line);
}

TEST_CASE("ptas against the oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = testing::random_points(rng, 4);
    EslConfig cfg;
    cfg.esfl.epsilon = 0.5;
    const double approx = solve_esl(pts, cfg).cost;
    const double opt = solve_esl_exact(pts).cost;
    CHECK(approx >= opt - 1e-9);
    CHECK(approx <= 1.5 * opt + 1e-12);
  }
}

TEST_CASE("mst strategy and determinism across jobs") {
  std::mt19937_64 rng(6);
  const auto pts = testing::random_points(rng, 5);
  EslConfig a, b;
  a.strategy = b.strategy = EslStrategy::Mst;
  b.jobs = 4;
  const EslSolution x = solve_esl(pts, a), y = solve_esl(pts, b);
  CHECK(x.cost == y.cost);
  CHECK(x.line == y.line);
  CHECK(x.esfl.graph == y.esfl.graph);
  CHECK(esl_strategy_from_string("mst") == EslStrategy::Mst);
  CHECK(esl_strategy_from_string("ptas") == EslStrategy::Ptas);
  CHECK_THROWS_AS(esl_strategy_from_string("magic"), Error);
}

TEST_CASE("tie-breaking is lexicographic") {
  // A square: both diagonals and all four sides tie pairwise.
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto cands = candidate_lines(sq);
  std::vector<EsflSolution> sols;
  for (const auto& c : cands) sols.push_back(solve_esfl_exact(Instance(sq, c.line)));
  const EslSolution best = pick_best_line(cands, sols);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (std::abs(sols[i].cost - best.cost) < 1e-12) {
      const auto& l = cands[i].line;
      CHECK(std::make_tuple(best.line.a(), best.line.b(), best.line.c()) <= std::make_tuple(l.a(), l.b(), l.c()));
    }
  }
  std::reverse(sols.begin(), sols.end());
  auto rev = cands;
  std::reverse(rev.begin(), rev.end());
  CHECK(pick_best_line(rev, sols).line == best.line);
}

}  // TEST_SUITE
