#include "steiner/esl.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "steiner/error.hpp"
#include "steiner/parallel.hpp"

namespace steiner {

namespace {
constexpr double kTieRel = 1e-12;
}  // namespace

const char* to_string(EslStrategy s) {
  switch (s) {
    case EslStrategy::Ptas: return "ptas";
    case EslStrategy::Mst: return "mst";
  }
  return "unknown";
}

EslStrategy esl_strategy_from_string(const std::string& s) {
  if (s == "ptas") return EslStrategy::Ptas;
  if (s == "mst") return EslStrategy::Mst;
  throw Error(ErrorCode::InvalidArgument, "unknown ESL strategy '" + s + "'");
}

std::vector<CandidateLine> candidate_lines(std::span<const Point> terminals) {
  const std::size_t n = terminals.size();
  if (n < 1) throw Error(ErrorCode::TooFewTerminals, "ESL needs at least one terminal");
  std::vector<CandidateLine> out;
  if (n == 1) {
    out.push_back({LineSpec::horizontal(terminals[0].y), {}});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const LineSpec l = LineSpec::through(terminals[i], terminals[j]);
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const CandidateLine& c) { return c.line.approx_equal(l); });
      if (it == out.end()) {
        out.push_back({l, {{i, j}}});
      } else {
        it->pairs.emplace_back(i, j);
      }
    }
  }
  return out;
}

EslSolution pick_best_line(const std::vector<CandidateLine>& cands, std::vector<EsflSolution> sols) {
  if (cands.empty() || cands.size() != sols.size()) {
    throw Error(ErrorCode::InvalidArgument, "one solution per candidate line expected");
  }
  // Costs within a relative 1e-12 of the minimum tie; rounding noise must
  // not decide between geometrically equal placements.
  double lo = sols[0].cost;
  for (const auto& s : sols) lo = std::min(lo, s.cost);
  const double cut = lo + kTieRel * std::max(1.0, std::abs(lo));
  auto key = [&](std::size_t i) {
    const LineSpec& l = cands[i].line;
    return std::make_tuple(l.a(), l.b(), l.c(), sols[i].cost);
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (sols[i].cost <= cut && (!best || key(i) < key(*best))) best = i;
  }
  EslSolution out;
  out.line = cands[*best].line;
  out.esfl = std::move(sols[*best]);
  if (!cands[*best].pairs.empty()) out.pair = cands[*best].pairs.front();
  out.candidates = cands.size();
  out.cost = out.esfl.cost;
  return out;
}

EslSolution solve_esl(std::span<const Point> terminals, const EslConfig& cfg) {
  const std::vector<CandidateLine> cands = candidate_lines(terminals);
  const std::vector<Point> pts(terminals.begin(), terminals.end());
  std::vector<EsflSolution> sols(cands.size());
  EsflConfig inner = cfg.esfl;
  inner.jobs = 1;
  parallel_for(cands.size(), cfg.jobs, [&](std::size_t i) {
    const Instance inst(pts, cands[i].line);
    sols[i] = cfg.strategy == EslStrategy::Mst ? solve_esfl_mst(inst) : solve_esfl_ptas(inst, inner);
  });
  return pick_best_line(cands, std::move(sols));
}

}  // namespace steiner
