#pragma once
/**
 * Brute-force reference solvers for small instances. They share only the
 * full Steiner tree construction with the production code; the line is
 * handled by partition enumeration instead of discretization.
 */

#include <cstddef>
#include <span>

#include "steiner/esfl.hpp"
#include "steiner/esl.hpp"
#include "steiner/steiner_graph.hpp"

namespace steiner {

inline constexpr std::size_t kOracleMaxEsfl = 6;
inline constexpr std::size_t kOracleMaxEsl = 5;

enum class AttachMethod {
  Analytic,  // line attachment as a Melzak root sliding on the line
  Golden,    // attachment x by multi-start golden-section search
};

struct OracleConfig {
  AttachMethod method = AttachMethod::Analytic;
  int golden_starts = 5;
  double golden_tol_rel = 1e-11;
};

/// Exact optimum: every set partition of each side's terminals, each group
/// attached to the line once. Throws TooLarge above kOracleMaxEsfl terminals.
EsflSolution solve_esfl_exact(const Instance& inst, const OracleConfig& cfg = {});

/// Minimum of solve_esfl_exact over candidate_lines. Throws TooLarge above
/// kOracleMaxEsl terminals.
EslSolution solve_esl_exact(std::span<const Point> terminals, const OracleConfig& cfg = {});

/// Edges joining a node strictly above y = 0 to one on y = 0 (|y| <= tol).
/// Edges to the line node use their attachment point.
std::size_t count_downward_edges(const SteinerGraph& t, double tol = 1e-9);

}  // namespace steiner
