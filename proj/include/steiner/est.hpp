#pragma once
/**
 * Euclidean Steiner tree solvers behind one dispatch point.
 *
 *  - enumerate_full_topologies: every full Steiner topology on n terminals,
 *    generated by the edge-subdivision recursion.
 *  - optimize_topology: minimum-length realization of a fixed topology by
 *    repeatedly moving each Steiner node to the Fermat point of its three
 *    neighbours.
 *  - melzak_realize: closed-form full Steiner tree of a full topology, if
 *    one exists (every Steiner angle at 120 degrees).
 *  - solve_exact: subset dynamic programme concatenating full Steiner trees
 *    at shared terminals.
 *  - solve_mst / insertion heuristic for instances above n_max_exact.
 */

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "steiner/geometry.hpp"
#include "steiner/steiner_graph.hpp"

namespace steiner {

struct EstConfig {
  std::size_t n_max_exact = 8;
  double tol_pos_rel = 1e-10;      // stop when max displacement < tol * diameter
  double nonconv_rel = 1e-6;       // NonConvergence above this displacement
  int max_iters = 10000;
  double collapse_rel = 1e-8;      // edge shorter than this * diameter counts as collapsed
  double insertion_tol_rel = 1e-9; // minimum relative gain for an insertion step
};

/// Terminal ids 0..n-1, Steiner ids n..n+k-1.
struct Topology {
  std::size_t n_terminals{};
  std::size_t n_steiner{};
  std::vector<std::pair<int, int>> edges;

  /// Tree, Steiner degree exactly 3, terminal degree 1..3, k <= n - 2.
  bool valid() const;
  bool is_full() const;
};

/// (2n - 5)!! for n >= 3, 1 for n = 2.
std::size_t full_topology_count(std::size_t n);

/// Calls `visit` once per full topology. Throws Error(TooLarge) if n > n_max.
void for_each_full_topology(std::size_t n, const std::function<void(const Topology&)>& visit,
                            std::size_t n_max = EstConfig{}.n_max_exact);
std::vector<Topology> enumerate_full_topologies(std::size_t n,
                                                std::size_t n_max = EstConfig{}.n_max_exact);

enum class Optimality { Exact, Heuristic };
const char* to_string(Optimality o);

struct EstSolution {
  SteinerGraph graph;  // terminals first (ids 0..n-1), then Steiner nodes
  double cost{};
  std::string solver_tag;
  Optimality optimality{Optimality::Heuristic};
};

/// Positions-only realization used by the solvers' inner loops.
struct Relaxation {
  std::vector<Point> steiner;  // indexed by Steiner id - n
  double cost{};
  int iterations{};
  bool degenerate{};
  bool monotone{true};
};

/// Fermat relocation on a fixed topology. `warm` (optional) seeds the
/// Steiner positions. Throws Error(NonConvergence).
Relaxation relax_topology(std::span<const Point> terminals, const Topology& topo,
                          const EstConfig& cfg = {}, std::span<const Point> warm = {},
                          std::vector<double>* cost_trace = nullptr);

struct TopologyResult {
  EstSolution solution;  // collapsed tree when degenerate
  bool degenerate{};
  int iterations{};
  bool monotone{true};
};

TopologyResult optimize_topology(std::span<const Point> terminals, const Topology& topo,
                                 const EstConfig& cfg = {});

struct FullRealization {
  std::vector<Point> steiner;  // indexed by Steiner id - n
  double cost{};
  Point root;  // position used for the root terminal
};

/// Melzak's construction: replaces sibling pairs by equilateral apexes
/// towards `root`, trying both sides for every Steiner node, then places
/// the Steiner points back on the Simpson lines. Returns nothing when no side
/// choice yields a tree with all angles at 120 degrees. With `root_on_line`
/// the root terminal is free on y = 0 and ends up as the foot of its branch.
std::optional<FullRealization> melzak_realize(std::span<const Point> terminals, const Topology& topo,
                                              std::size_t root = 0, bool root_on_line = false);

/// Global optimum for n <= n_max_exact. Throws Error(TooLarge).
EstSolution solve_exact(std::span<const Point> terminals, const EstConfig& cfg = {});

/// Optimal tree length for every subset of the terminals, indexed by bit
/// mask (bit i set: terminal i included). Same size limit as solve_exact.
std::vector<double> exact_subset_costs(std::span<const Point> terminals, const EstConfig& cfg = {});

/// Euclidean minimum spanning tree (Prim, O(n^2)).
EstSolution solve_mst(std::span<const Point> terminals);

/// MST followed by greedy Steiner-point insertion on adjacent MST edge pairs.
EstSolution solve_insertion(std::span<const Point> terminals, const EstConfig& cfg = {});

enum class EstStrategy { ExactIfSmall, Mst, Insertion };
const char* to_string(EstStrategy s);
EstStrategy est_strategy_from_string(const std::string& s);

EstSolution solve_est(std::span<const Point> terminals, EstStrategy strategy,
                      const EstConfig& cfg = {});

/// Index pairs of a Euclidean MST over `pts`.
std::vector<std::pair<int, int>> mst_edges(std::span<const Point> pts);
double mst_length(std::span<const Point> pts);

}  // namespace steiner
