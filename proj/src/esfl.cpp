#include "steiner/esfl.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "steiner/error.hpp"
#include "steiner/parallel.hpp"

namespace steiner {

std::vector<Point> DiscretizedInstance::est_terminals() const {
  std::vector<Point> out = real_terminals;
  out.insert(out.end(), line_points.begin(), line_points.end());
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition and bounds

namespace {

void require_canonical(const Instance& inst) {
  if (!inst.line || !(*inst.line == LineSpec::horizontal(0.0))) {
    throw Error(ErrorCode::NotCanonical, "expected the line y = 0");
  }
  for (const auto& p : inst.terminals) {
    if (p.y < 0.0) throw Error(ErrorCode::NotCanonical, "terminal below the line");
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<std::vector<std::size_t>> decompose_indices(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return lex_less(pts[i], pts[j]); });
  // Right flank of the pyramid over a prefix must stay left of the left
  // flank over the matching suffix.
  std::vector<double> suffix_min(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t k = n; k-- > 0;) {
    const Point& p = pts[order[k]];
    suffix_min[k] = std::min(suffix_min[k + 1], p.x - p.y * kCot30);
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double prefix_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& p = pts[order[k]];
    prefix_max = std::max(prefix_max, p.x + p.y * kCot30);
    current.push_back(order[k]);
    if (k + 1 < n && prefix_max < suffix_min[k + 1]) {
      groups.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) groups.push_back(std::move(current));
  return groups;
}

std::vector<Instance> decompose(const Instance& canonical) {
  require_canonical(canonical);
  std::vector<Instance> out;
  for (const auto& g : decompose_indices(canonical.terminals)) {
    std::vector<Point> pts;
    pts.reserve(g.size());
    for (auto i : g) pts.push_back(canonical.terminals[i]);
    out.emplace_back(std::move(pts), LineSpec::horizontal(0.0));
  }
  return out;
}

double lower_bound(const Instance& piece) {
  require_canonical(piece);
  // Every terminal needs its own path down to the line.
  return std::max(width(piece.terminals) / kWidthRatio, height(piece.terminals));
}

double lower_bound_decomposed(const Instance& canonical) {
  double s = 0.0;
  for (const auto& piece : decompose(canonical)) s += lower_bound(piece);
  return s;
}

DiscretizedInstance discretize(const Instance& canonical, double eps) {
  require_canonical(canonical);
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive and finite");
  }
  DiscretizedInstance d;
  d.real_terminals = canonical.terminals;
  d.epsilon_used = eps;
  const auto [lo, hi] = std::minmax_element(
      canonical.terminals.begin(), canonical.terminals.end(),
      [](const Point& p, const Point& q) { return p.x < q.x; });
  const double x0 = lo->x;
  d.width = hi->x - x0;
  if (d.width <= 0.0) {
    d.line_points.push_back(Point(x0, 0.0));
    return d;
  }
  const double slots = std::ceil(static_cast<double>(canonical.size()) / eps);
  if (slots > 1e7) throw Error(ErrorCode::TooLarge, "too many line points for this epsilon");
  const auto k = static_cast<std::size_t>(slots);
  d.spacing = d.width / slots;
  d.line_points.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    d.line_points.push_back(Point(x0 + d.width * static_cast<double>(i) / slots, 0.0));
  }
  d.line_points.push_back(Point(hi->x, 0.0));
  return d;
}

namespace {

/// Node id of every line point, by line index.
std::vector<int> line_point_ids(const SteinerGraph& t, std::size_t count) {
  std::vector<int> ids(count, -1);
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::LinePoint && n.source >= 0 && static_cast<std::size_t>(n.source) < count) {
      ids[static_cast<std::size_t>(n.source)] = n.id;
    }
  }
  return ids;
}

}  // namespace

HoleReport count_holes(const SteinerGraph& t, const DiscretizedInstance& disc) {
  HoleReport r;
  r.total_slots = disc.slots();
  const auto ids = line_point_ids(t, disc.line_points.size());
  std::set<std::pair<int, int>> segs;
  for (const auto& e : t.edges()) segs.insert(std::minmax(e.u, e.v));
  for (std::size_t i = 0; i < r.total_slots; ++i) {
    const bool present = ids[i] >= 0 && ids[i + 1] >= 0 && segs.count(std::minmax(ids[i], ids[i + 1]));
    if (present) {
      ++r.segments_present;
      continue;
    }
    ++r.holes;
    if (!r.hole_runs.empty() && r.hole_runs.back().second + 1 == i) {
      r.hole_runs.back().second = i;
    } else {
      r.hole_runs.emplace_back(i, i);
    }
  }
  return r;
}

SteinerGraph label_line_points(const SteinerGraph& est, const DiscretizedInstance& disc) {
  const std::size_t n = disc.real_terminals.size(), m = disc.line_points.size();
  SteinerGraph g;
  for (const auto& node : est.nodes()) {
    const auto i = static_cast<std::size_t>(node.id);
    if (i < n) {
      g.add_node(NodeKind::Terminal, *node.position, static_cast<int>(i));
    } else if (i < n + m) {
      g.add_node(NodeKind::LinePoint, *node.position, static_cast<int>(i - n));
    } else {
      g.add_node(NodeKind::Steiner, *node.position);
    }
  }
  for (const auto& e : est.edges()) g.add_edge(e.u, e.v);
  return g;
}

SteinerGraph hole_stress_tree(const DiscretizedInstance& disc) {
  SteinerGraph g;
  std::vector<int> lp;
  for (const auto& p : disc.real_terminals) g.add_node(NodeKind::Terminal, p, static_cast<int>(g.node_count()));
  for (std::size_t i = 0; i < disc.line_points.size(); ++i) {
    lp.push_back(g.add_node(NodeKind::LinePoint, disc.line_points[i], static_cast<int>(i)));
  }
  // Even indices left to right, then odd indices right to left.
  std::vector<int> order;
  for (std::size_t i = 0; i < lp.size(); i += 2) order.push_back(lp[i]);
  for (std::size_t i = lp.size() - (lp.size() % 2 == 0 ? 1 : 2); i < lp.size(); i -= 2) order.push_back(lp[i]);
  for (std::size_t i = 1; i < order.size(); ++i) g.add_edge(order[i - 1], order[i]);
  for (std::size_t t = 0; t < disc.real_terminals.size(); ++t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < lp.size(); ++i) {
      if (distance(disc.real_terminals[t], disc.line_points[i]) <
          distance(disc.real_terminals[t], disc.line_points[best])) {
        best = i;
      }
    }
    g.add_edge(static_cast<int>(t), lp[best]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Hole filling

namespace {

class WorkTree {
 public:
  WorkTree(const SteinerGraph& t, const DiscretizedInstance& disc, double d)
      : line_ids_(disc.line_points.size(), -1), spacing_(d) {
    if (!t.is_tree()) throw Error(ErrorCode::NonTree, "hole filling needs a tree");
    for (const auto& n : t.nodes()) {
      if (!n.position) throw Error(ErrorCode::InvalidArgument, "hole filling needs positioned nodes");
      const int id = add(n.kind, *n.position, n.source);
      if (n.kind == NodeKind::LinePoint) line_ids_.at(static_cast<std::size_t>(n.source)) = id;
    }
    for (const auto& e : t.edges()) link(e.u, e.v);
  }

  int add(NodeKind kind, const Point& p, int source = -1) {
    pos_.push_back(p);
    kind_.push_back(kind);
    source_.push_back(source);
    alive_.push_back(1);
    adj_.emplace_back();
    return static_cast<int>(pos_.size()) - 1;
  }

  void link(int a, int b) {
    adj_[idx(a)].push_back(b);
    adj_[idx(b)].push_back(a);
  }
  void unlink(int a, int b) {
    auto& la = adj_[idx(a)];
    la.erase(std::find(la.begin(), la.end(), b));
    auto& lb = adj_[idx(b)];
    lb.erase(std::find(lb.begin(), lb.end(), a));
  }
  bool has_edge(int a, int b) const {
    const auto& la = adj_[idx(a)];
    return std::find(la.begin(), la.end(), b) != la.end();
  }
  void kill(int v) {
    while (!adj_[idx(v)].empty()) unlink(v, adj_[idx(v)].front());
    alive_[idx(v)] = 0;
  }

  double length(int a, int b) const { return distance(pos_[idx(a)], pos_[idx(b)]); }
  bool is_segment(int a, int b) const {
    if (kind_[idx(a)] != NodeKind::LinePoint || kind_[idx(b)] != NodeKind::LinePoint) return false;
    return std::abs(source_[idx(a)] - source_[idx(b)]) == 1;
  }
  bool is_steiner(int v) const { return kind_[idx(v)] == NodeKind::Steiner; }

  double weight() const {
    double w = 0.0;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (int v : adj_[u]) {
        if (static_cast<std::size_t>(v) > u) w += length(static_cast<int>(u), v);
      }
    }
    return w;
  }

  std::size_t holes() const {
    std::size_t h = 0;
    for (std::size_t i = 0; i + 1 < line_ids_.size(); ++i) {
      if (!has_edge(line_ids_[i], line_ids_[i + 1])) ++h;
    }
    return h;
  }

  /// Step 1: drop Steiner points of degree 2 (and stray leaves).
  void remove_low_degree() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t v = 0; v < adj_.size(); ++v) {
        if (!alive_[v] || kind_[v] != NodeKind::Steiner || adj_[v].size() > 2) continue;
        const auto nb = adj_[v];
        kill(static_cast<int>(v));
        if (nb.size() == 2) link(nb[0], nb[1]);
        changed = true;
      }
    }
  }

  /// Step 2: split Steiner points of degree above 3.
  void split_high_degree() {
    for (std::size_t v = 0; v < adj_.size(); ++v) {
      while (alive_[v] && kind_[v] == NodeKind::Steiner && adj_[v].size() > 3) {
        const int w1 = adj_[v][0], w2 = adj_[v][1];
        const int sv = static_cast<int>(v);
        const int u = add(NodeKind::Steiner, pos_[v]);
        unlink(sv, w1);
        unlink(sv, w2);
        link(u, sv);
        link(u, w1);
        link(u, w2);
      }
    }
  }

  /// Step 3: swap one missing segment in for the longest cycle edge.
  bool swap_in_segment(double tie_rel, std::size_t& swaps) {
    for (std::size_t i = 0; i + 1 < line_ids_.size(); ++i) {
      const int a = line_ids_[i], b = line_ids_[i + 1];
      if (has_edge(a, b)) continue;
      const auto path = path_between(a, b);
      int eu = -1, ev = -1;
      double best = -1.0;
      bool best_seg = true;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int p = path[k], q = path[k + 1];
        const double len = length(p, q);
        const bool seg = is_segment(p, q);
        const bool tie = std::abs(len - best) <= tie_rel * std::max(len, best);
        if ((!tie && len > best) || (tie && best_seg && !seg)) {
          best = len;
          best_seg = seg;
          eu = p;
          ev = q;
        }
      }
      // The new segment itself (length d) is on the cycle too; ties favour
      // removing a non-segment.
      if (eu < 0 || best_seg || best < spacing_ * (1.0 - tie_rel)) continue;
      unlink(eu, ev);
      link(a, b);
      ++swaps;
      return true;
    }
    return false;
  }

  /// Step 4: replace a run of five line-tethered Steiner points by a local optimum.
  bool splice_run(const EstConfig& est, std::set<std::vector<int>>& processed, std::size_t& splices,
                  std::size_t& rollbacks) {
    const std::size_t total = adj_.size();
    // Steiner points with a line-point neighbour, and their line neighbour.
    std::vector<int> tether(total, -1);
    for (std::size_t v = 0; v < total; ++v) {
      if (!alive_[v] || kind_[v] != NodeKind::Steiner) continue;
      for (int w : adj_[v]) {
        if (kind_[idx(w)] == NodeKind::LinePoint) {
          tether[v] = w;
          break;
        }
      }
    }
    auto tethered_nbrs = [&](std::size_t v) {
      std::vector<int> out;
      for (int w : adj_[v]) {
        if (tether[idx(w)] >= 0) out.push_back(w);
      }
      return out;
    };
    std::vector<char> seen(total, 0);
    for (std::size_t start = 0; start < total; ++start) {
      if (tether[start] < 0 || seen[start]) continue;
      if (tethered_nbrs(start).size() > 1) continue;  // walk from path ends only
      std::vector<int> run;
      int prev = -1, cur = static_cast<int>(start);
      while (cur >= 0 && !seen[idx(cur)]) {
        seen[idx(cur)] = 1;
        run.push_back(cur);
        int next = -1;
        for (int w : tethered_nbrs(idx(cur))) {
          if (w != prev) next = w;
        }
        prev = cur;
        cur = next;
      }
      for (std::size_t k = 0; k + 5 <= run.size(); ++k) {
        std::vector<int> key(run.begin() + static_cast<std::ptrdiff_t>(k),
                             run.begin() + static_cast<std::ptrdiff_t>(k + 5));
        std::array<int, 5> lines{};
        for (std::size_t j = 0; j < 5; ++j) {
          lines[j] = tether[idx(key[j])];
          key.push_back(lines[j]);
        }
        std::vector<int> distinct(lines.begin(), lines.end());
        std::sort(distinct.begin(), distinct.end());
        if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end()) continue;
        if (processed.count(key)) continue;
        if (try_splice(key, est)) {
          ++splices;
          return true;
        }
        ++rollbacks;
        processed.insert(key);
      }
    }
    return false;
  }

  SteinerGraph export_graph() const {
    SteinerGraph g;
    std::vector<int> id(pos_.size(), -1);
    for (NodeKind k : {NodeKind::Terminal, NodeKind::LinePoint, NodeKind::Steiner}) {
      for (std::size_t v = 0; v < pos_.size(); ++v) {
        if (alive_[v] && kind_[v] == k) id[v] = g.add_node(k, pos_[v], source_[v]);
      }
    }
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (int v : adj_[u]) {
        if (static_cast<std::size_t>(v) > u) g.add_edge(id[u], id[idx(v)]);
      }
    }
    return g;
  }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }

  std::vector<int> path_between(int a, int b) const {
    std::vector<int> parent(adj_.size(), -2);
    std::vector<int> queue{a};
    parent[idx(a)] = -1;
    for (std::size_t h = 0; h < queue.size() && parent[idx(b)] == -2; ++h) {
      for (int w : adj_[idx(queue[h])]) {
        if (parent[idx(w)] == -2) {
          parent[idx(w)] = queue[h];
          queue.push_back(w);
        }
      }
    }
    std::vector<int> path;
    if (parent[idx(b)] == -2) return path;
    for (int v = b; v != -1; v = parent[idx(v)]) path.push_back(v);
    return path;
  }

  /// key = s1..s5 then l'1..l'5. Restores the previous state on failure.
  bool try_splice(const std::vector<int>& key, const EstConfig& est) {
    const WorkTree backup = *this;
    const double w0 = weight();
    const std::size_t h0 = holes();

    // Terminals of the sub-instance: l'1..l'5, s1, s5.
    std::array<int, 7> term{key[5], key[6], key[7], key[8], key[9], key[0], key[4]};
    std::vector<Point> pts;
    for (int v : term) pts.push_back(pos_[idx(v)]);
    EstSolution local;
    try {
      local = solve_exact(pts, est);
    } catch (const Error&) {
      return false;
    }
    for (std::size_t j = 1; j <= 3; ++j) kill(key[j]);

    std::vector<int> map(local.graph.node_count(), -1);
    for (std::size_t j = 0; j < 7; ++j) map[j] = term[j];
    for (std::size_t j = 7; j < map.size(); ++j) {
      map[j] = add(NodeKind::Steiner, *local.graph.node(static_cast<int>(j)).position);
    }
    // Union-find over the current forest tells when a new edge closes a cycle.
    std::vector<int> parent(adj_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[idx(x)] != x) x = parent[idx(x)] = parent[idx(parent[idx(x)])];
      return x;
    };
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (int v : adj_[u]) parent[idx(find(static_cast<int>(u)))] = find(v);
    }
    for (const auto& e : local.graph.edges()) {
      const int u = map[idx(e.u)], v = map[idx(e.v)];
      if (u == v || has_edge(u, v)) continue;
      if (find(u) != find(v)) {
        parent[idx(find(u))] = find(v);
        link(u, v);
        continue;
      }
      // Drop the heaviest non-segment edge of the cycle u ~> v -> u.
      const auto path = path_between(u, v);
      int du = u, dv = v;
      double worst = length(u, v);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int p = path[k], q = path[k + 1];
        if (!is_segment(p, q) && length(p, q) > worst) {
          worst = length(p, q);
          du = p;
          dv = q;
        }
      }
      if (du == u && dv == v) continue;  // the new edge is the heaviest: skip it
      unlink(du, dv);
      link(u, v);
    }
    const double w1 = weight();
    const std::size_t h1 = holes();
    if (w1 > w0 * (1.0 + 1e-12) || h1 >= h0) {
      *this = backup;
      return false;
    }
    return true;
  }

  std::vector<Point> pos_;
  std::vector<NodeKind> kind_;
  std::vector<int> source_;
  std::vector<char> alive_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> line_ids_;
  double spacing_{};
};

}  // namespace

SteinerGraph fill_holes(const SteinerGraph& t, const DiscretizedInstance& disc, const FillConfig& cfg,
                        FillStats* stats) {
  WorkTree w(t, disc, disc.spacing);
  FillStats s;
  s.weight_before = w.weight();
  s.holes_before = w.holes();
  const std::size_t max_rounds = cfg.max_rounds ? cfg.max_rounds : disc.slots() + 1;
  std::set<std::vector<int>> processed;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    ++s.step_runs[0];
    w.remove_low_degree();
    ++s.step_runs[1];
    w.split_high_degree();
    ++s.step_runs[2];
    if (w.swap_in_segment(cfg.tie_rel, s.swaps)) continue;
    ++s.step_runs[3];
    if (w.splice_run(cfg.est, processed, s.splices, s.rollbacks)) continue;
    break;
  }
  s.weight_after = w.weight();
  s.holes_after = w.holes();
  if (stats) *stats = s;
  return w.export_graph();
}

// ---------------------------------------------------------------------------
// Contraction

namespace {

struct LinkEdge {
  int u{}, v{};  // v == line node for tethers
  double w{};
  std::optional<Point> attach;
};

/// Removes Steiner points left with degree 1 or 2, re-dropping perpendiculars
/// where a bypass leads to the line.
std::vector<LinkEdge> prune_steiner(std::vector<LinkEdge> edges, const std::vector<Point>& pos,
                                    const std::vector<NodeKind>& kind, int line_node) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::size_t>> inc(pos.size() + 1);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      inc[static_cast<std::size_t>(edges[i].u)].push_back(i);
      inc[static_cast<std::size_t>(edges[i].v)].push_back(i);
    }
    for (std::size_t v = 0; v < pos.size(); ++v) {
      if (kind[v] != NodeKind::Steiner || inc[v].size() > 2 || inc[v].empty()) continue;
      std::vector<int> others;
      for (auto e : inc[v]) others.push_back(edges[e].u == static_cast<int>(v) ? edges[e].v : edges[e].u);
      std::vector<LinkEdge> next;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (std::find(inc[v].begin(), inc[v].end(), i) == inc[v].end()) next.push_back(edges[i]);
      }
      if (others.size() == 2) {
        int a = others[0], b = others[1];
        if (a == line_node) std::swap(a, b);
        if (b == line_node) {
          const Point& p = pos[static_cast<std::size_t>(a)];
          next.push_back({a, b, std::abs(p.y), Point::unchecked(p.x, 0.0)});
        } else {
          next.push_back({a, b, distance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]), {}});
        }
      }
      edges = std::move(next);
      changed = true;
      break;
    }
  }
  return edges;
}

}  // namespace

EsflSolution contract_line(const SteinerGraph& t, const DiscretizedInstance& /*disc*/, bool snap) {
  // Contracted node ids: every non-line-point node in order, then the line.
  std::vector<int> cid(t.node_count(), -1);
  std::vector<Point> pos;
  std::vector<NodeKind> kind;
  std::vector<int> source;
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::LinePoint) continue;
    if (n.kind == NodeKind::LineNode) throw Error(ErrorCode::InvalidArgument, "tree already has a line node");
    cid[static_cast<std::size_t>(n.id)] = static_cast<int>(pos.size());
    pos.push_back(*n.position);
    kind.push_back(n.kind);
    source.push_back(n.source);
  }
  const int line = static_cast<int>(pos.size());

  std::vector<LinkEdge> cand;
  for (const auto& e : t.edges()) {
    const Node& a = t.node(e.u);
    const Node& b = t.node(e.v);
    const bool la = a.kind == NodeKind::LinePoint, lb = b.kind == NodeKind::LinePoint;
    if (la && lb) continue;
    if (la || lb) {
      const Node& v = la ? b : a;
      const Point& l = la ? *a.position : *b.position;
      const Point& p = *v.position;
      if (snap) {
        cand.push_back({cid[static_cast<std::size_t>(v.id)], line, std::abs(p.y), Point::unchecked(p.x, 0.0)});
      } else {
        cand.push_back({cid[static_cast<std::size_t>(v.id)], line, distance(p, l), l});
      }
      continue;
    }
    cand.push_back({cid[static_cast<std::size_t>(e.u)], cid[static_cast<std::size_t>(e.v)], e.length, {}});
  }

  // Kruskal over the contracted multigraph.
  std::stable_sort(cand.begin(), cand.end(), [](const LinkEdge& x, const LinkEdge& y) { return x.w < y.w; });
  std::vector<int> parent(pos.size() + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  std::vector<LinkEdge> kept;
  for (const auto& e : cand) {
    const int ru = find(e.u), rv = find(e.v);
    if (ru == rv) continue;
    parent[static_cast<std::size_t>(ru)] = rv;
    kept.push_back(e);
  }
  if (snap) kept = prune_steiner(std::move(kept), pos, kind, line);

  std::vector<char> used(pos.size(), 0);
  for (const auto& e : kept) {
    if (e.u != line) used[static_cast<std::size_t>(e.u)] = 1;
    if (e.v != line) used[static_cast<std::size_t>(e.v)] = 1;
  }
  EsflSolution out;
  out.graph = SteinerGraph(LineSpec::horizontal(0.0));
  std::vector<int> gid(pos.size(), -1);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (kind[i] != NodeKind::Steiner || used[i]) gid[i] = out.graph.add_node(kind[i], pos[i], source[i]);
  }
  out.graph.add_line_node();
  for (const auto& e : kept) {
    if (e.v == line) {
      out.graph.add_line_edge(gid[static_cast<std::size_t>(e.u)], *e.attach);
    } else {
      out.graph.add_edge(gid[static_cast<std::size_t>(e.u)], gid[static_cast<std::size_t>(e.v)]);
    }
  }
  out.cost = out.graph.total_cost();
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end solvers

namespace {

struct PieceResult {
  EsflSolution solution;  // canonical frame
  PieceReport report;
  double t_est{}, t_fill{}, t_contract{};
};

PieceResult solve_piece(const std::vector<Point>& pts, const EsflConfig& cfg, double eps_inner) {
  PieceResult r;
  const Instance piece(pts, LineSpec::horizontal(0.0));
  const DiscretizedInstance disc = discretize(piece, eps_inner);
  r.report.n = pts.size();
  r.report.width = disc.width;
  r.report.spacing = disc.spacing;
  r.report.line_points = disc.line_points.size();
  r.report.lower_bound = lower_bound(piece);

  auto t0 = std::chrono::steady_clock::now();
  const EstSolution est = solve_est(disc.est_terminals(), cfg.strategy, cfg.est);
  r.t_est = seconds_since(t0);
  r.report.inner = est.optimality;
  SteinerGraph tree = label_line_points(est.graph, disc);
  r.report.est_cost = tree.total_cost();

  t0 = std::chrono::steady_clock::now();
  if (cfg.fill) {
    FillConfig fc;
    fc.est = cfg.est;
    tree = fill_holes(tree, disc, fc, &r.report.fill);
  } else {
    r.report.fill.holes_before = r.report.fill.holes_after = count_holes(tree, disc).holes;
    r.report.fill.weight_before = r.report.fill.weight_after = tree.total_cost();
  }
  r.t_fill = seconds_since(t0);
  r.report.holes_before = r.report.fill.holes_before;
  r.report.holes_after = r.report.fill.holes_after;
  r.report.filled_cost = tree.total_cost();

  t0 = std::chrono::steady_clock::now();
  r.solution = contract_line(tree, disc, cfg.snap);
  r.t_contract = seconds_since(t0);
  r.report.cost = r.solution.cost;
  r.report.w_prime = r.report.filled_cost - r.report.cost;
  r.report.w_prime_floor = disc.width - static_cast<double>(r.report.holes_after) * disc.spacing;
  return r;
}

void finish(EsflSolution& sol) {
  sol.cost = sol.graph.total_cost();
  sol.ratio_bound = sol.lower_bound > 0.0 ? sol.cost / sol.lower_bound : 1.0;
  sol.report.cost = sol.cost;
  sol.report.lower_bound = sol.lower_bound;
  sol.report.ratio_bound = sol.ratio_bound;
}

}  // namespace

double canonical_lower_bound(const Canonicalization& canon) {
  double lb = 0.0;
  for (const auto& side : canon.sides) lb += lower_bound_decomposed(side.instance);
  return lb;
}

SteinerGraph assemble_pieces(const Instance& inst, const Canonicalization& canon,
                             const std::vector<CanonicalPiece>& pieces) {
  SteinerGraph out(inst.line);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    out.add_node(NodeKind::Terminal, inst.terminals[i], static_cast<int>(i));
  }
  out.add_line_node();
  for (auto i : canon.on_line) out.add_perpendicular_edge(static_cast<int>(i));
  for (const auto& piece : pieces) {
    const CanonicalSide& side = canon.sides.at(piece.side);
    const SteinerGraph& g = piece.graph;
    std::vector<int> id(g.node_count(), -1);
    for (const auto& n : g.nodes()) {
      if (n.kind == NodeKind::Terminal) {
        const std::size_t local = piece.members.at(static_cast<std::size_t>(n.source));
        id[static_cast<std::size_t>(n.id)] = static_cast<int>(side.original_index.at(local));
      } else if (n.kind == NodeKind::Steiner) {
        id[static_cast<std::size_t>(n.id)] =
            out.add_node(NodeKind::Steiner, side.to_canonical.inverse(*n.position));
      } else if (n.kind == NodeKind::LinePoint) {
        throw Error(ErrorCode::InvalidArgument, "piece still contains line points");
      }
    }
    for (const auto& e : g.edges()) {
      const bool lu = g.node(e.u).kind == NodeKind::LineNode;
      const bool lv = g.node(e.v).kind == NodeKind::LineNode;
      if (lu || lv) {
        const int v = id[static_cast<std::size_t>(lu ? e.v : e.u)];
        out.add_line_edge(v, side.to_canonical.inverse(*e.attachment));
      } else {
        out.add_edge(id[static_cast<std::size_t>(e.u)], id[static_cast<std::size_t>(e.v)]);
      }
    }
  }
  return out;
}

EsflSolution solve_esfl_ptas(const Instance& inst, const EsflConfig& cfg) {
  if (!inst.line) throw Error(ErrorCode::MissingLine, "ESfL needs a line");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive and finite");
  }
  const double eps_inner = cfg.rescale ? cfg.epsilon / kEpsilonDivisor : cfg.epsilon;
  auto t0 = std::chrono::steady_clock::now();
  const Canonicalization canon = canonicalize(inst);
  const double t_canon = seconds_since(t0);

  struct Job {
    std::size_t side;
    std::vector<std::size_t> members;  // indices into the side's terminals
  };
  t0 = std::chrono::steady_clock::now();
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < canon.sides.size(); ++s) {
    for (auto& g : decompose_indices(canon.sides[s].instance.terminals)) jobs.push_back({s, std::move(g)});
  }
  const double t_decompose = seconds_since(t0);

  std::vector<PieceResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t j) {
    std::vector<Point> pts;
    for (auto i : jobs[j].members) pts.push_back(canon.sides[jobs[j].side].instance.terminals[i]);
    results[j] = solve_piece(pts, cfg, eps_inner);
  });

  std::vector<CanonicalPiece> pieces(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    pieces[j] = {jobs[j].side, jobs[j].members, std::move(results[j].solution.graph)};
  }
  EsflSolution sol;
  sol.graph = assemble_pieces(inst, canon, pieces);

  SolveReport& rep = sol.report;
  rep.guarantee_exact = true;
  double t_est = 0.0, t_fill = 0.0, t_contract = 0.0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const PieceReport& pr = results[j].report;
    sol.lower_bound += pr.lower_bound;
    rep.holes_before += pr.holes_before;
    rep.holes_after += pr.holes_after;
    rep.w_prime += pr.w_prime;
    rep.width += pr.width;
    rep.guarantee_exact = rep.guarantee_exact && pr.inner == Optimality::Exact;
    rep.pieces.push_back(pr);
    t_est += results[j].t_est;
    t_fill += results[j].t_fill;
    t_contract += results[j].t_contract;
  }
  rep.instance_digest = instance_digest(inst);
  rep.solver_tag = std::string("ptas/") + to_string(cfg.strategy);
  rep.epsilon = cfg.epsilon;
  rep.epsilon_inner = eps_inner;
  rep.phase_seconds = {{"canonicalize", t_canon}, {"decompose", t_decompose}, {"est", t_est},
                       {"fill_holes", t_fill},    {"contract", t_contract}};
  finish(sol);
  return sol;
}

EsflSolution solve_esfl_mst(const Instance& inst) {
  if (!inst.line) throw Error(ErrorCode::MissingLine, "ESfL needs a line");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = inst.size();
  const LineSpec& l = *inst.line;
  // Prim over terminals plus the line (index n).
  std::vector<double> key(n + 1, std::numeric_limits<double>::infinity());
  std::vector<int> link(n + 1, -1);
  std::vector<char> in(n + 1, 0);
  key[n] = 0.0;
  auto dist = [&](std::size_t a, std::size_t b) {
    if (a == n) return point_line_distance(inst.terminals[b], l);
    if (b == n) return point_line_distance(inst.terminals[a], l);
    return distance(inst.terminals[a], inst.terminals[b]);
  };
  EsflSolution sol;
  sol.graph = SteinerGraph(inst.line);
  for (std::size_t i = 0; i < n; ++i) sol.graph.add_node(NodeKind::Terminal, inst.terminals[i], static_cast<int>(i));
  sol.graph.add_line_node();
  for (std::size_t iter = 0; iter <= n; ++iter) {
    std::size_t u = n + 1;
    for (std::size_t i = 0; i <= n; ++i) {
      if (!in[i] && (u == n + 1 || key[i] < key[u])) u = i;
    }
    in[u] = 1;
    if (link[u] >= 0) {
      const auto p = static_cast<std::size_t>(link[u]);
      if (p == n) sol.graph.add_perpendicular_edge(static_cast<int>(u));
      else if (u == n) sol.graph.add_perpendicular_edge(static_cast<int>(p));
      else sol.graph.add_edge(static_cast<int>(p), static_cast<int>(u));
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (in[i]) continue;
      const double d = dist(u, i);
      if (d < key[i]) {
        key[i] = d;
        link[i] = static_cast<int>(u);
      }
    }
  }
  sol.lower_bound = canonical_lower_bound(canonicalize(inst));
  sol.report.instance_digest = instance_digest(inst);
  sol.report.solver_tag = "mst";
  sol.report.phase_seconds = {{"mst", seconds_since(t0)}};
  finish(sol);
  return sol;
}

std::string instance_digest(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v + 0.0);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : inst.terminals) {
    mix(p.x);
    mix(p.y);
  }
  if (inst.line) {
    mix(inst.line->a());
    mix(inst.line->b());
    mix(inst.line->c());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace steiner
