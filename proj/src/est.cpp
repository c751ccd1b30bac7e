#include "steiner/est.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>

#include "steiner/error.hpp"

namespace steiner {

const char* to_string(Optimality o) { return o == Optimality::Exact ? "exact" : "heuristic"; }

const char* to_string(EstStrategy s) {
  switch (s) {
    case EstStrategy::ExactIfSmall: return "exact";
    case EstStrategy::Mst: return "mst";
    case EstStrategy::Insertion: return "insertion";
  }
  return "?";
}

EstStrategy est_strategy_from_string(const std::string& s) {
  if (s == "exact" || s == "exact_if_small") return EstStrategy::ExactIfSmall;
  if (s == "mst") return EstStrategy::Mst;
  if (s == "insertion") return EstStrategy::Insertion;
  throw Error(ErrorCode::InvalidArgument, "unknown EST strategy '" + s + "'");
}

// ---------------------------------------------------------------------------
// Topologies

bool Topology::valid() const {
  const std::size_t n = n_terminals, k = n_steiner, v = n + k;
  if (n == 0) return false;
  if (n >= 2 && k > n - 2) return false;
  if (n < 2 && k > 0) return false;
  if (edges.size() + 1 != v) return false;
  std::vector<int> deg(v, 0);
  std::vector<int> parent(v);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= v || static_cast<std::size_t>(b) >= v || a == b) {
      return false;
    }
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[static_cast<std::size_t>(ra)] = rb;
  }
  for (std::size_t i = 0; i < v; ++i) {
    if (i < n && v > 1 && (deg[i] < 1 || deg[i] > 3)) return false;
    if (i >= n && deg[i] != 3) return false;
  }
  return true;
}

bool Topology::is_full() const {
  if (!valid()) return false;
  if (n_terminals >= 2 && n_steiner != n_terminals - 2) return false;
  std::vector<int> deg(n_terminals + n_steiner, 0);
  for (auto [a, b] : edges) {
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
  }
  return std::all_of(deg.begin(), deg.begin() + static_cast<std::ptrdiff_t>(n_terminals),
                     [&](int d) { return d == 1 || n_terminals == 1; });
}

std::size_t full_topology_count(std::size_t n) {
  std::size_t c = 1;
  for (std::size_t i = 3; i < n; ++i) c *= 2 * i - 3;
  return c;
}

namespace {

void grow_topology(Topology& topo, std::size_t next_terminal,
                   const std::function<void(const Topology&)>& visit) {
  const std::size_t n = topo.n_terminals;
  if (next_terminal == n) {
    visit(topo);
    return;
  }
  const int t = static_cast<int>(next_terminal);
  const int s = static_cast<int>(n + next_terminal - 2);
  const std::size_t m = topo.edges.size();
  for (std::size_t e = 0; e < m; ++e) {
    const auto [u, v] = topo.edges[e];
    topo.edges[e] = {u, s};
    topo.edges.push_back({s, v});
    topo.edges.push_back({t, s});
    grow_topology(topo, next_terminal + 1, visit);
    topo.edges.pop_back();
    topo.edges.pop_back();
    topo.edges[e] = {u, v};
  }
}

}  // namespace

void for_each_full_topology(std::size_t n, const std::function<void(const Topology&)>& visit,
                            std::size_t n_max) {
  if (n > n_max) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " terminals exceed n_max_exact=" +
                                         std::to_string(n_max));
  }
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "full topologies need n >= 2");
  Topology topo;
  topo.n_terminals = n;
  topo.n_steiner = n - 2;
  if (n == 2) {
    topo.edges = {{0, 1}};
    visit(topo);
    return;
  }
  const int s0 = static_cast<int>(n);
  topo.edges = {{0, s0}, {1, s0}, {2, s0}};
  topo.edges.reserve(2 * n - 3);
  grow_topology(topo, 3, visit);
}

std::vector<Topology> enumerate_full_topologies(std::size_t n, std::size_t n_max) {
  std::vector<Topology> out;
  out.reserve(n <= n_max ? full_topology_count(n) : 0);
  for_each_full_topology(n, [&](const Topology& t) { out.push_back(t); }, n_max);
  return out;
}

namespace {

/// Full topologies for every n up to 8, built once.
const std::vector<Topology>& cached_full_topologies(std::size_t n) {
  static const std::array<std::vector<Topology>, 9> cache = [] {
    std::array<std::vector<Topology>, 9> c;
    for (std::size_t k = 2; k <= 8; ++k) c[k] = enumerate_full_topologies(k, 8);
    return c;
  }();
  return cache.at(n);
}

// ---------------------------------------------------------------------------
// Fixed-topology relaxation

struct TopoView {
  std::size_t n{}, k{};
  std::vector<std::array<int, 3>> nbr;  // neighbours of each Steiner node
};

TopoView make_view(const Topology& topo) {
  TopoView v;
  v.n = topo.n_terminals;
  v.k = topo.n_steiner;
  v.nbr.assign(v.k, {-1, -1, -1});
  std::vector<int> fill(v.k, 0);
  auto add = [&](int s, int other) {
    const auto i = static_cast<std::size_t>(s) - v.n;
    v.nbr[i][static_cast<std::size_t>(fill[i]++)] = other;
  };
  for (auto [a, b] : topo.edges) {
    if (static_cast<std::size_t>(a) >= v.n) add(a, b);
    if (static_cast<std::size_t>(b) >= v.n) add(b, a);
  }
  return v;
}

/// Centroid of the hop-nearest terminal in each of a Steiner node's branches.
std::vector<Point> initial_positions(std::span<const Point> terms, const Topology& topo,
                                     const TopoView& view) {
  const std::size_t total = view.n + view.k;
  std::vector<std::vector<int>> adj(total);
  for (auto [a, b] : topo.edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<Point> pos(view.k);
  std::vector<int> queue, from;
  for (std::size_t s = 0; s < view.k; ++s) {
    Point acc = Point::unchecked(0, 0);
    const int self = static_cast<int>(view.n + s);
    for (int start : view.nbr[s]) {
      // BFS inside the branch that starts at `start`.
      queue.assign(1, start);
      from.assign(1, self);
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        if (static_cast<std::size_t>(u) < view.n) {
          acc = acc + terms[static_cast<std::size_t>(u)];
          break;
        }
        for (int w : adj[static_cast<std::size_t>(u)]) {
          if (w != from[head]) {
            queue.push_back(w);
            from.push_back(u);
          }
        }
      }
    }
    pos[s] = acc * (1.0 / 3.0);
  }
  return pos;
}

double topology_cost(std::span<const Point> terms, const Topology& topo,
                     std::span<const Point> steiner) {
  const std::size_t n = topo.n_terminals;
  auto at = [&](int id) {
    const auto i = static_cast<std::size_t>(id);
    return i < n ? terms[i] : steiner[i - n];
  };
  double c = 0.0;
  for (auto [a, b] : topo.edges) c += distance(at(a), at(b));
  return c;
}

Point unit_or_zero(const Point& v) {
  const double l = v.norm();
  return l > 0.0 ? v * (1.0 / l) : Point::unchecked(0, 0);
}

/// Two adjacent Steiner nodes sitting on the same spot can stall coordinate-wise
/// relocation. Tries a joint move or a split along the steepest first-order
/// descent direction; returns true if the cost dropped.
bool escape_coincidence(std::span<const Point> terms, const Topology& topo, const TopoView& view,
                        std::vector<Point>& pos, double collapse, double diam) {
  auto at = [&](int id) {
    const auto i = static_cast<std::size_t>(id);
    return i < view.n ? terms[i] : pos[i - view.n];
  };
  const double base = topology_cost(terms, topo, pos);
  for (std::size_t s = 0; s < view.k; ++s) {
    for (int other : view.nbr[s]) {
      // Each Steiner-Steiner pair once, from its lower-numbered end.
      if (static_cast<std::size_t>(other) <= view.n + s) continue;
      const auto o = static_cast<std::size_t>(other) - view.n;
      const Point p = pos[s];
      if (distance(p, pos[o]) > collapse) continue;
      Point f = Point::unchecked(0, 0), g = Point::unchecked(0, 0);
      for (int w : view.nbr[s]) {
        if (w != other) f = f + unit_or_zero(at(w) - p);
      }
      const int self = static_cast<int>(view.n + s);
      for (int w : view.nbr[o]) {
        if (w != self) g = g + unit_or_zero(at(w) - p);
      }
      struct Move {
        double gain;
        Point ds, dother;
      };
      std::vector<Move> moves;
      const Point fg = f + g;
      if (fg.norm() > 1e-9) moves.push_back({fg.norm(), unit_or_zero(fg), unit_or_zero(fg)});
      if (f.norm() > 1.0 + 1e-9) moves.push_back({f.norm() - 1.0, unit_or_zero(f), Point::unchecked(0, 0)});
      if (g.norm() > 1.0 + 1e-9) moves.push_back({g.norm() - 1.0, Point::unchecked(0, 0), unit_or_zero(g)});
      std::sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.gain > b.gain; });
      for (const auto& m : moves) {
        for (double step = 0.1 * diam; step > 1e-14 * diam; step *= 0.5) {
          std::vector<Point> trial = pos;
          trial[s] = p + m.ds * step;
          trial[o] = pos[o] + m.dother * step;
          if (topology_cost(terms, topo, trial) < base - 1e-15 * diam) {
            pos = std::move(trial);
            return true;
          }
        }
      }
    }
  }
  return false;
}

}  // namespace

Relaxation relax_topology(std::span<const Point> terms, const Topology& topo, const EstConfig& cfg,
                          std::span<const Point> warm, std::vector<double>* cost_trace) {
  if (terms.size() != topo.n_terminals) {
    throw Error(ErrorCode::InvalidArgument, "terminal count does not match topology");
  }
  const TopoView view = make_view(topo);
  Relaxation r;
  const double diam = std::max(diameter(terms), std::numeric_limits<double>::min());
  if (view.k == 0) {
    r.cost = topology_cost(terms, topo, {});
    return r;
  }
  std::vector<Point> pos = warm.size() == view.k ? std::vector<Point>(warm.begin(), warm.end())
                                                 : initial_positions(terms, topo, view);
  auto at = [&](int id) {
    const auto i = static_cast<std::size_t>(id);
    return i < view.n ? terms[i] : pos[i - view.n];
  };
  const double tol = cfg.tol_pos_rel * diam;
  const double collapse = cfg.collapse_rel * diam;
  double cost = topology_cost(terms, topo, pos);
  if (cost_trace) cost_trace->push_back(cost);
  double disp = std::numeric_limits<double>::infinity();
  int escapes = 0;
  double stretch = 1.0;
  std::vector<Point> before(view.k), trial(view.k);
  for (r.iterations = 0; r.iterations < cfg.max_iters;) {
    ++r.iterations;
    before = pos;
    for (std::size_t s = 0; s < view.k; ++s) {
      const auto& nb = view.nbr[s];
      pos[s] = fermat_point(at(nb[0]), at(nb[1]), at(nb[2]));
    }
    double next_cost = topology_cost(terms, topo, pos);
    // Slow sweeps tend to move in a steady direction: try continuing along
    // it and keep the jump only if it helps.
    for (std::size_t s = 0; s < view.k; ++s) trial[s] = pos[s] + (pos[s] - before[s]) * stretch;
    const double trial_cost = topology_cost(terms, topo, trial);
    if (trial_cost < next_cost) {
      pos.swap(trial);
      next_cost = trial_cost;
      stretch = std::min(stretch * 2.0, 1024.0);
    } else {
      stretch = std::max(stretch * 0.25, 1.0);
    }
    disp = 0.0;
    for (std::size_t s = 0; s < view.k; ++s) disp = std::max(disp, distance(pos[s], before[s]));
    if (next_cost > cost * (1.0 + 1e-12) + 1e-300) r.monotone = false;
    cost = next_cost;
    if (cost_trace) cost_trace->push_back(cost);
    if (disp < tol) {
      if (escapes < 64 && escape_coincidence(terms, topo, view, pos, collapse, diam)) {
        ++escapes;
        cost = topology_cost(terms, topo, pos);
        if (cost_trace) cost_trace->push_back(cost);
        continue;
      }
      break;
    }
  }
  if (r.iterations >= cfg.max_iters && disp > cfg.nonconv_rel * diam) {
    throw Error(ErrorCode::NonConvergence,
                "fixed-topology relaxation stalled after " + std::to_string(r.iterations) + " sweeps");
  }
  for (auto [a, b] : topo.edges) {
    const bool steiner_edge = static_cast<std::size_t>(a) >= view.n || static_cast<std::size_t>(b) >= view.n;
    if (steiner_edge && distance(at(a), at(b)) <= collapse) r.degenerate = true;
  }
  r.cost = cost;
  r.steiner = std::move(pos);
  return r;
}

namespace {

/// Builds a graph from a realized topology, merging Steiner nodes into
/// neighbours they collapsed onto.
SteinerGraph realize(std::span<const Point> terms, const Topology& topo,
                     std::span<const Point> steiner, double collapse) {
  const std::size_t n = topo.n_terminals, total = n + topo.n_steiner;
  auto at = [&](std::size_t i) { return i < n ? terms[i] : steiner[i - n]; };
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<char> has_terminal(total, 0);
  for (std::size_t i = 0; i < n; ++i) has_terminal[i] = 1;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : topo.edges) {
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    if ((ua < n && ub < n) || distance(at(ua), at(ub)) > collapse) continue;
    std::size_t ra = find(ua), rb = find(ub);
    if (ra == rb || (has_terminal[ra] && has_terminal[rb])) continue;
    if (has_terminal[rb] || (!has_terminal[ra] && rb < ra)) std::swap(ra, rb);
    parent[rb] = ra;  // terminal (or lower id) stays representative
  }
  SteinerGraph g;
  std::vector<int> id(total, -1);
  for (std::size_t i = 0; i < n; ++i) id[i] = g.add_node(NodeKind::Terminal, terms[i], static_cast<int>(i));
  for (std::size_t i = n; i < total; ++i) {
    if (find(i) == i) id[i] = g.add_node(NodeKind::Steiner, at(i));
  }
  for (auto [a, b] : topo.edges) {
    const std::size_t ra = find(static_cast<std::size_t>(a)), rb = find(static_cast<std::size_t>(b));
    if (ra != rb) g.add_edge(id[ra], id[rb]);
  }
  return g;
}

EstSolution trivial_solution(std::span<const Point> terms, const char* tag) {
  EstSolution s;
  s.solver_tag = tag;
  s.optimality = Optimality::Exact;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    s.graph.add_node(NodeKind::Terminal, terms[i], static_cast<int>(i));
  }
  if (terms.size() == 2) s.graph.add_edge(0, 1);
  s.cost = s.graph.total_cost();
  return s;
}

}  // namespace

TopologyResult optimize_topology(std::span<const Point> terms, const Topology& topo,
                                 const EstConfig& cfg) {
  if (!topo.valid() || topo.n_terminals != terms.size()) {
    throw Error(ErrorCode::InvalidArgument, "topology does not fit the terminal set");
  }
  const Relaxation r = relax_topology(terms, topo, cfg);
  TopologyResult out;
  out.degenerate = r.degenerate;
  out.iterations = r.iterations;
  out.monotone = r.monotone;
  const double collapse = cfg.collapse_rel * std::max(diameter(terms), std::numeric_limits<double>::min());
  out.solution.graph = realize(terms, topo, r.steiner, collapse);
  out.solution.cost = out.solution.graph.total_cost();
  out.solution.solver_tag = "topology";
  out.solution.optimality = Optimality::Heuristic;
  return out;
}

// ---------------------------------------------------------------------------
// Melzak construction of full Steiner trees

std::optional<FullRealization> melzak_realize(std::span<const Point> terms, const Topology& topo,
                                              std::size_t root, bool root_on_line) {
  const std::size_t n = topo.n_terminals, k = topo.n_steiner;
  if (terms.size() != n || n < 3 || k != n - 2 || root >= n) {
    throw Error(ErrorCode::InvalidArgument, "Melzak construction needs a full topology and n >= 3");
  }
  const std::size_t total = n + k;
  std::vector<std::vector<int>> adj(total);
  for (auto [a, b] : topo.edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  // Children of each Steiner node with the tree hung from the root terminal;
  // `order` lists Steiner nodes parents first.
  std::vector<std::array<int, 2>> child(total, {-1, -1});
  std::vector<int> parent(total, -1), order;
  std::vector<int> stack{static_cast<int>(root)};
  parent[root] = static_cast<int>(total);
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    const auto ui = static_cast<std::size_t>(u);
    if (ui >= n) order.push_back(u);
    int c = 0;
    for (int w : adj[ui]) {
      if (parent[static_cast<std::size_t>(w)] != -1) continue;
      parent[static_cast<std::size_t>(w)] = u;
      if (ui >= n) child[ui][static_cast<std::size_t>(c++)] = w;
      stack.push_back(w);
    }
  }
  const int top = adj[root].front();

  const double diam = std::max(diameter(terms), std::numeric_limits<double>::min());
  std::vector<Point> virt(total), place(total);
  for (std::size_t i = 0; i < n; ++i) virt[i] = place[i] = terms[i];
  std::optional<FullRealization> best;
  for (std::uint32_t sides = 0; sides < (1u << k); ++sides) {
    // Bottom-up: replace the two children of each Steiner node by the apex of
    // the equilateral triangle on them, on the side picked by `sides`.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto s = static_cast<std::size_t>(*it);
      const Point& p = virt[static_cast<std::size_t>(child[s][0])];
      const Point& q = virt[static_cast<std::size_t>(child[s][1])];
      const Point d = q - p;
      const double sign = (sides >> (s - n)) & 1u ? 1.0 : -1.0;
      virt[s] = (p + q) * 0.5 + Point::unchecked(-d.y, d.x) * (sign * kCot30 / 2.0);
    }
    const Point& apex = virt[static_cast<std::size_t>(top)];
    Point anchor = terms[root];
    if (root_on_line) {
      if (!(apex.y > 0.0)) continue;
      anchor = Point::unchecked(apex.x, 0.0);
    }
    place[root] = anchor;
    const double length = distance(anchor, apex);
    if (best && length >= best->cost) continue;
    // Top-down: each Steiner point is where the segment from its parent to
    // its apex meets the circle through the apex and the two children.
    bool ok = true;
    for (int si : order) {
      const auto s = static_cast<std::size_t>(si);
      const Point& from = place[static_cast<std::size_t>(parent[s])];
      const Point& e = virt[s];
      const Point centre = (virt[static_cast<std::size_t>(child[s][0])] +
                            virt[static_cast<std::size_t>(child[s][1])] + e) * (1.0 / 3.0);
      const double span = distance(from, e);
      if (span <= 0.0) {
        ok = false;
        break;
      }
      const Point u = (from - e) * (1.0 / span);
      const double t = -2.0 * (e - centre).dot(u);
      if (!(t > 0.0 && t < span)) {
        ok = false;
        break;
      }
      place[s] = e + u * t;
    }
    if (!ok) continue;
    // Every Steiner point must see its three neighbours at 120 degrees.
    for (std::size_t s = n; s < total && ok; ++s) {
      Point sum = Point::unchecked(0, 0);
      for (int w : adj[s]) {
        const Point d = place[static_cast<std::size_t>(w)] - place[s];
        const double l = d.norm();
        if (l <= 1e-12 * diam) {
          ok = false;
          break;
        }
        sum = sum + d * (1.0 / l);
      }
      ok = ok && sum.norm() <= 1e-7;
    }
    if (!ok) continue;
    FullRealization r;
    r.steiner.assign(place.begin() + static_cast<std::ptrdiff_t>(n), place.end());
    r.root = anchor;
    r.cost = 0.0;
    for (auto [a, b] : topo.edges) {
      r.cost += distance(place[static_cast<std::size_t>(a)], place[static_cast<std::size_t>(b)]);
    }
    if (!best || r.cost < best->cost) best = std::move(r);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exact solver: subset DP over full Steiner subtrees

namespace {

struct ExactTable {
  struct Fst {
    double cost = std::numeric_limits<double>::infinity();
    const Topology* topo = nullptr;
    std::vector<Point> steiner;
  };
  std::vector<Fst> fst;
  std::vector<double> best;
  std::vector<std::uint32_t> split;   // 0: use fst; else A (contains the shared terminal)
  std::vector<std::uint32_t> shared;
};

void check_exact_size(std::size_t n, const EstConfig& cfg) {
  if (n > cfg.n_max_exact || n > 8) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " terminals exceed n_max_exact=" +
                                         std::to_string(std::min<std::size_t>(cfg.n_max_exact, 8)));
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no terminals");
}

ExactTable build_exact_table(std::span<const Point> terms) {
  const std::size_t n = terms.size();
  const std::uint32_t full = (1u << n) - 1u;
  ExactTable tab;
  tab.fst.resize(full + 1);
  tab.best.assign(full + 1, std::numeric_limits<double>::infinity());
  tab.split.assign(full + 1, 0);
  tab.shared.assign(full + 1, 0);
  tab.best[0] = 0.0;
  std::vector<Point> sub;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int k = std::popcount(mask);
    if (k < 2) {
      tab.best[mask] = 0.0;
      continue;
    }
    sub.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(terms[i]);
    }
    auto& f = tab.fst[mask];
    if (k == 2) {
      f.cost = distance(sub[0], sub[1]);
      f.topo = &cached_full_topologies(2).front();
    } else {
      for (const Topology& topo : cached_full_topologies(static_cast<std::size_t>(k))) {
        auto r = melzak_realize(sub, topo);
        if (r && r->cost < f.cost) f = {r->cost, &topo, std::move(r->steiner)};
      }
    }
    double& best = tab.best[mask];
    best = f.cost;
    // Split at a shared terminal t: mask = A u B, A n B = {t}.
    for (std::size_t t = 0; t < n; ++t) {
      const std::uint32_t tb = 1u << t;
      if (!(mask & tb)) continue;
      const std::uint32_t rest = mask & ~tb;
      for (std::uint32_t a = (rest - 1) & rest; a; a = (a - 1) & rest) {
        const std::uint32_t b = rest & ~a;
        if (a < b) continue;  // each unordered split once
        const double c = tab.best[a | tb] + tab.best[b | tb];
        if (c < best) {
          best = c;
          tab.split[mask] = a | tb;
          tab.shared[mask] = tb;
        }
      }
    }
  }
  return tab;
}

}  // namespace

std::vector<double> exact_subset_costs(std::span<const Point> terms, const EstConfig& cfg) {
  check_exact_size(terms.size(), cfg);
  return build_exact_table(terms).best;
}

EstSolution solve_exact(std::span<const Point> terms, const EstConfig& cfg) {
  const std::size_t n = terms.size();
  check_exact_size(n, cfg);
  if (n <= 2) return trivial_solution(terms, "exact");
  const std::uint32_t full = (1u << n) - 1u;
  const ExactTable tab = build_exact_table(terms);
  const auto& fst = tab.fst;
  const auto& split = tab.split;
  const auto& shared = tab.shared;

  EstSolution sol;
  sol.solver_tag = "exact";
  sol.optimality = Optimality::Exact;
  SteinerGraph& g = sol.graph;
  for (std::size_t i = 0; i < n; ++i) g.add_node(NodeKind::Terminal, terms[i], static_cast<int>(i));
  std::vector<std::uint32_t> stack{full};
  while (!stack.empty()) {
    const std::uint32_t mask = stack.back();
    stack.pop_back();
    if (split[mask] != 0) {
      const std::uint32_t a = split[mask];
      stack.push_back(a);
      stack.push_back((mask & ~a) | shared[mask]);
      continue;
    }
    const auto& f = fst[mask];
    std::vector<int> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) ids.push_back(static_cast<int>(i));
    }
    for (const Point& p : f.steiner) ids.push_back(g.add_node(NodeKind::Steiner, p));
    for (auto [u, v] : f.topo->edges) g.add_edge(ids[static_cast<std::size_t>(u)], ids[static_cast<std::size_t>(v)]);
  }
  sol.cost = g.total_cost();
  return sol;
}

// ---------------------------------------------------------------------------
// MST and insertion heuristic

std::vector<std::pair<int, int>> mst_edges(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  std::vector<std::pair<int, int>> out;
  if (n < 2) return out;
  out.reserve(n - 1);
  std::vector<double> key(n, std::numeric_limits<double>::infinity());
  std::vector<int> link(n, -1);
  std::vector<char> in(n, 0);
  key[0] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i] && (u == n || key[i] < key[u])) u = i;
    }
    in[u] = 1;
    if (link[u] >= 0) out.emplace_back(link[u], static_cast<int>(u));
    for (std::size_t i = 0; i < n; ++i) {
      if (in[i]) continue;
      const double d = distance(pts[u], pts[i]);
      if (d < key[i]) {
        key[i] = d;
        link[i] = static_cast<int>(u);
      }
    }
  }
  return out;
}

double mst_length(std::span<const Point> pts) {
  double s = 0.0;
  for (auto [a, b] : mst_edges(pts)) s += distance(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
  return s;
}

EstSolution solve_mst(std::span<const Point> terms) {
  EstSolution s;
  s.solver_tag = "mst";
  s.optimality = Optimality::Heuristic;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    s.graph.add_node(NodeKind::Terminal, terms[i], static_cast<int>(i));
  }
  for (auto [a, b] : mst_edges(terms)) s.graph.add_edge(a, b);
  s.cost = s.graph.total_cost();
  return s;
}

namespace {

struct WorkTree {
  std::vector<Point> pts;  // terminals first, then Steiner points
  std::size_t n_terminals{};
  std::vector<std::vector<int>> adj;

  double cost() const {
    double c = 0.0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
      for (int w : adj[u]) {
        if (static_cast<std::size_t>(w) > u) c += distance(pts[u], pts[static_cast<std::size_t>(w)]);
      }
    }
    return c;
  }

  void rebuild_mst() {
    adj.assign(pts.size(), {});
    for (auto [a, b] : mst_edges(pts)) {
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
  }

  void unlink(int a, int b) {
    auto& la = adj[static_cast<std::size_t>(a)];
    la.erase(std::find(la.begin(), la.end(), b));
    auto& lb = adj[static_cast<std::size_t>(b)];
    lb.erase(std::find(lb.begin(), lb.end(), a));
  }

  void link(int a, int b) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }

  /// Drops Steiner leaves and bypasses degree-2 Steiner points; then compacts.
  void prune() {
    bool changed = true;
    std::vector<char> dead(pts.size(), 0);
    while (changed) {
      changed = false;
      for (std::size_t s = n_terminals; s < pts.size(); ++s) {
        if (dead[s]) continue;
        auto& nb = adj[s];
        if (nb.size() <= 1) {
          if (nb.size() == 1) unlink(static_cast<int>(s), nb.front());
          dead[s] = 1;
          changed = true;
        } else if (nb.size() == 2) {
          const int a = nb[0], b = nb[1];
          unlink(static_cast<int>(s), a);
          unlink(static_cast<int>(s), b);
          link(a, b);
          dead[s] = 1;
          changed = true;
        }
      }
    }
    std::vector<int> remap(pts.size(), -1);
    std::vector<Point> np;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!dead[i]) {
        remap[i] = static_cast<int>(np.size());
        np.push_back(pts[i]);
      }
    }
    std::vector<std::vector<int>> nadj(np.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (dead[i]) continue;
      for (int w : adj[i]) nadj[static_cast<std::size_t>(remap[i])].push_back(remap[static_cast<std::size_t>(w)]);
    }
    pts = std::move(np);
    adj = std::move(nadj);
  }

  /// Fermat sweeps over degree-3 Steiner points with the topology fixed.
  void relax(int sweeps, double tol) {
    for (int it = 0; it < sweeps; ++it) {
      double disp = 0.0;
      for (std::size_t s = n_terminals; s < pts.size(); ++s) {
        const auto& nb = adj[s];
        if (nb.size() != 3) continue;
        const Point next = fermat_point(pts[static_cast<std::size_t>(nb[0])], pts[static_cast<std::size_t>(nb[1])],
                                        pts[static_cast<std::size_t>(nb[2])]);
        disp = std::max(disp, distance(next, pts[s]));
        pts[s] = next;
      }
      if (disp < tol) break;
    }
  }
};

}  // namespace

EstSolution solve_insertion(std::span<const Point> terms, const EstConfig& cfg) {
  EstSolution mst = solve_mst(terms);
  mst.solver_tag = "insertion";
  if (terms.size() < 3) return mst;

  WorkTree t;
  t.pts.assign(terms.begin(), terms.end());
  t.n_terminals = terms.size();
  t.rebuild_mst();
  const double diam = diameter(terms);
  double cost = t.cost();
  WorkTree best = t;
  double best_cost = cost;

  for (std::size_t round = 0; round < 4 * terms.size() + 16; ++round) {
    double gain = 0.0;
    int bu = -1, bv = -1, bw = -1;
    Point bp;
    for (std::size_t v = 0; v < t.pts.size(); ++v) {
      const auto& nb = t.adj[v];
      for (std::size_t i = 0; i < nb.size(); ++i) {
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
          const Point& pu = t.pts[static_cast<std::size_t>(nb[i])];
          const Point& pw = t.pts[static_cast<std::size_t>(nb[j])];
          const Point& pv = t.pts[v];
          const Point f = fermat_point(pu, pv, pw);
          const double g = distance(pu, pv) + distance(pv, pw) -
                           (distance(f, pu) + distance(f, pv) + distance(f, pw));
          if (g > gain) {
            gain = g;
            bu = nb[i];
            bv = static_cast<int>(v);
            bw = nb[j];
            bp = f;
          }
        }
      }
    }
    if (bu < 0 || gain <= cfg.insertion_tol_rel * cost) break;
    const int s = static_cast<int>(t.pts.size());
    t.pts.push_back(bp);
    t.adj.emplace_back();
    t.unlink(bu, bv);
    t.unlink(bv, bw);
    t.link(s, bu);
    t.link(s, bv);
    t.link(s, bw);
    t.relax(200, cfg.tol_pos_rel * diam);
    const double relaxed = t.cost();
    // Re-spanning over terminals and Steiner points can only shorten the tree.
    WorkTree respanned = t;
    respanned.rebuild_mst();
    respanned.prune();
    respanned.relax(200, cfg.tol_pos_rel * diam);
    if (respanned.cost() <= relaxed) t = std::move(respanned);
    else t.prune();
    const double next = t.cost();
    if (next >= cost - cfg.insertion_tol_rel * cost) {
      cost = std::min(cost, next);
      if (next < best_cost) {
        best = t;
        best_cost = next;
      }
      break;
    }
    cost = next;
    if (cost < best_cost) {
      best = t;
      best_cost = cost;
    }
  }

  if (best_cost >= mst.cost) return mst;
  EstSolution sol;
  sol.solver_tag = "insertion";
  sol.optimality = Optimality::Heuristic;
  for (std::size_t i = 0; i < best.pts.size(); ++i) {
    if (i < best.n_terminals) sol.graph.add_node(NodeKind::Terminal, best.pts[i], static_cast<int>(i));
    else sol.graph.add_node(NodeKind::Steiner, best.pts[i]);
  }
  for (std::size_t u = 0; u < best.adj.size(); ++u) {
    for (int w : best.adj[u]) {
      if (static_cast<std::size_t>(w) > u) sol.graph.add_edge(static_cast<int>(u), w);
    }
  }
  sol.cost = sol.graph.total_cost();
  return sol;
}

EstSolution solve_est(std::span<const Point> terms, EstStrategy strategy, const EstConfig& cfg) {
  if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "no terminals");
  switch (strategy) {
    case EstStrategy::Mst: return solve_mst(terms);
    case EstStrategy::Insertion: return solve_insertion(terms, cfg);
    case EstStrategy::ExactIfSmall:
      if (terms.size() <= cfg.n_max_exact && terms.size() <= 8) return solve_exact(terms, cfg);
      return solve_insertion(terms, cfg);
  }
  return solve_mst(terms);
}

}  // namespace steiner
