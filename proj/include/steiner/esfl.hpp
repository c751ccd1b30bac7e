#pragma once
/**
 * Steiner tree with a fixed zero-cost line.
 *
 * The approximation scheme works in the canonical frame (line y = 0,
 * terminals above it): split into independent pieces, replace the line by
 * equally spaced line points, solve the resulting plain Steiner tree
 * instance, repair it so that few line segments are missing, then contract
 * the line points back into the line.
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "steiner/est.hpp"
#include "steiner/geometry.hpp"
#include "steiner/steiner_graph.hpp"

namespace steiner {

/// 1 + 2 / tan(30 deg): width-to-optimum ratio of an indecomposable piece.
inline constexpr double kWidthRatio = 1.0 + 2.0 * kCot30;
/// Outer-to-inner epsilon rescaling of the approximation guarantee.
inline constexpr double kEpsilonDivisor = 51.0;

struct DiscretizedInstance {
  std::vector<Point> real_terminals;
  std::vector<Point> line_points;  // left to right on y = 0
  double spacing{};                // 0 for a zero-width piece
  double epsilon_used{};
  double width{};

  std::size_t slots() const { return line_points.empty() ? 0 : line_points.size() - 1; }
  /// Terminal set of the plain Steiner tree instance: real terminals, then line points.
  std::vector<Point> est_terminals() const;
};

struct HoleReport {
  std::size_t total_slots{};
  std::size_t holes{};
  std::size_t segments_present{};
  std::vector<std::pair<std::size_t, std::size_t>> hole_runs;  // [first, last] slot of each run
};

struct FillConfig {
  EstConfig est;
  double tie_rel = 1e-12;   // relative tolerance for equal edge lengths
  std::size_t max_rounds = 0;  // 0: slots + 1
};

struct FillStats {
  std::array<std::size_t, 4> step_runs{};  // executions of steps 1..4
  std::size_t holes_before{};
  std::size_t holes_after{};
  double weight_before{};
  double weight_after{};
  std::size_t swaps{};       // step 3 exchanges
  std::size_t splices{};     // accepted step 4 replacements
  std::size_t rollbacks{};   // rejected step 4 replacements
};

struct PieceReport {
  std::size_t n{};
  double width{};
  double spacing{};
  std::size_t line_points{};
  std::size_t holes_before{};
  std::size_t holes_after{};
  double est_cost{};       // inner solution
  double filled_cost{};    // after hole filling
  double cost{};           // after contraction
  double w_prime{};        // filled_cost - cost
  double w_prime_floor{};  // width - holes_after * spacing
  double lower_bound{};
  Optimality inner{Optimality::Heuristic};
  FillStats fill;
};

struct SolveReport {
  std::string instance_digest;
  std::string solver_tag;
  double epsilon{};
  double epsilon_inner{};
  double cost{};
  double lower_bound{};
  double ratio_bound{};
  std::size_t holes_before{};
  std::size_t holes_after{};
  double w_prime{};
  double width{};
  bool guarantee_exact{};
  std::uint64_t seed{};
  std::vector<PieceReport> pieces;
  std::map<std::string, double> phase_seconds;
};

struct EsflSolution {
  SteinerGraph graph;  // exactly one line node
  double cost{};
  double lower_bound{};
  double ratio_bound{};
  SolveReport report;
};

/// Index groups of the independent pieces of a canonical point set, each
/// sorted by x. Concatenation is the x-sorted input.
std::vector<std::vector<std::size_t>> decompose_indices(std::span<const Point> pts);
std::vector<Instance> decompose(const Instance& canonical);

/// Bound for one indecomposable piece; throws NotCanonical off the canonical frame.
double lower_bound(const Instance& piece);
/// Sum of piece bounds over a whole canonical instance.
double lower_bound_decomposed(const Instance& canonical);

DiscretizedInstance discretize(const Instance& canonical, double eps);

HoleReport count_holes(const SteinerGraph& t, const DiscretizedInstance& disc);

/// Relabels an inner solution over est_terminals() so that line points carry
/// NodeKind::LinePoint with their index as source.
SteinerGraph label_line_points(const SteinerGraph& est, const DiscretizedInstance& disc);

/// Hole repair; throws NonTree if `t` is not a tree.
SteinerGraph fill_holes(const SteinerGraph& t, const DiscretizedInstance& disc,
                        const FillConfig& cfg = {}, FillStats* stats = nullptr);

/// Synthetic hole-filling input: the line points form one path that skips
/// every other point, so almost every slot is a hole, and each terminal hangs
/// from its nearest line point.
SteinerGraph hole_stress_tree(const DiscretizedInstance& disc);

/// Merges the line points into a single line node and removes cycles by an
/// MST of the contracted multigraph. Result is in the canonical frame.
EsflSolution contract_line(const SteinerGraph& t, const DiscretizedInstance& disc, bool snap = true);

/// Sum of piece bounds over both sides of a canonicalized instance.
double canonical_lower_bound(const Canonicalization& canon);

/// A solved group of one canonical side. Terminal nodes of `graph` carry the
/// position in `members` as source; the graph has one line node on y = 0.
struct CanonicalPiece {
  std::size_t side{};
  std::vector<std::size_t> members;  // indices into the side's terminals
  SteinerGraph graph;
};

/// Maps solved pieces back to the input frame and joins them through the
/// line node. Terminals keep their input ids; on-line terminals get a
/// zero-length tether.
SteinerGraph assemble_pieces(const Instance& inst, const Canonicalization& canon,
                             const std::vector<CanonicalPiece>& pieces);

struct EsflConfig {
  double epsilon = 0.5;
  EstStrategy strategy = EstStrategy::ExactIfSmall;
  bool snap = true;
  bool fill = true;
  bool rescale = true;  // run the inner construction at epsilon / 51
  unsigned jobs = 1;
  EstConfig est;
};

EsflSolution solve_esfl_ptas(const Instance& inst, const EsflConfig& cfg = {});

/// Spanning tree over terminals and the line, with perpendicular drops.
EsflSolution solve_esfl_mst(const Instance& inst);

/// FNV-1a over the bit patterns of all coordinates, as 16 hex digits.
std::string instance_digest(const Instance& inst);

}  // namespace steiner
