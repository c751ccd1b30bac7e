#pragma once
/**
 * Steiner tree with a free zero-cost line. Some optimal line passes through
 * two terminals, so the solver enumerates those lines and solves each
 * placement as a fixed-line problem.
 */

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "steiner/esfl.hpp"
#include "steiner/geometry.hpp"

namespace steiner {

struct CandidateLine {
  LineSpec line;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // every terminal pair on the line, i < j
};

/// One line per distinct normalized LineSpec through two terminals, in order
/// of first defining pair. A single terminal yields the horizontal line
/// through it with no pairs. Throws TooFewTerminals for an empty set.
std::vector<CandidateLine> candidate_lines(std::span<const Point> terminals);

enum class EslStrategy { Ptas, Mst };
const char* to_string(EslStrategy s);
EslStrategy esl_strategy_from_string(const std::string& s);

struct EslConfig {
  EslStrategy strategy = EslStrategy::Ptas;
  EsflConfig esfl;  // epsilon, inner strategy, ablation flags
  unsigned jobs = 1;
};

struct EslSolution {
  LineSpec line = LineSpec::horizontal(0.0);
  EsflSolution esfl;  // solved with exactly `line`
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // absent for n = 1
  std::size_t candidates{};
  double cost{};
};

/// Best placement over candidate_lines. Costs within a relative 1e-12 of the
/// minimum tie and go to the lexicographically smallest (a, b, c), so the
/// choice does not depend on scheduling or candidate order.
EslSolution solve_esl(std::span<const Point> terminals, const EslConfig& cfg = {});

/// Shared reduction step: picks the winner among per-candidate solutions.
EslSolution pick_best_line(const std::vector<CandidateLine>& cands, std::vector<EsflSolution> sols);

}  // namespace steiner
