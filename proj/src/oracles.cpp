#include "steiner/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

#include "steiner/error.hpp"
#include "steiner/est.hpp"

namespace steiner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Point> subset(std::span<const Point> pts, std::uint32_t mask) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (mask & (1u << i)) out.push_back(pts[i]);
  }
  return out;
}

std::vector<int> members(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask >> i; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

/// Adds `est` (over the terminals of `mask`) to `g`, whose terminal ids are
/// the side indices.
void add_tree(SteinerGraph& g, const EstSolution& est, std::uint32_t mask) {
  const std::vector<int> term = members(mask);
  std::vector<int> id(est.graph.node_count());
  for (const auto& n : est.graph.nodes()) {
    id[static_cast<std::size_t>(n.id)] = n.kind == NodeKind::Terminal
                                             ? term[static_cast<std::size_t>(n.source)]
                                             : g.add_node(NodeKind::Steiner, *n.position);
  }
  for (const auto& e : est.graph.edges()) {
    g.add_edge(id[static_cast<std::size_t>(e.u)], id[static_cast<std::size_t>(e.v)]);
  }
}

/// Calls visit(groups) for every set partition of {0..m-1}, groups as masks.
void for_each_partition(std::size_t m, const std::function<void(const std::vector<std::uint32_t>&)>& visit) {
  std::vector<std::size_t> label(m, 0);  // restricted growth string
  std::vector<std::uint32_t> groups;
  while (true) {
    groups.assign(m, 0);
    std::size_t used = 0;
    for (std::size_t i = 0; i < m; ++i) {
      groups[label[i]] |= 1u << i;
      used = std::max(used, label[i] + 1);
    }
    groups.resize(used);
    visit(groups);
    // Next string: bump the last position that may grow, zero the tail.
    std::size_t i = m;
    for (; i > 1; --i) {
      const std::size_t prefix_max = *std::max_element(label.begin(), label.begin() + static_cast<std::ptrdiff_t>(i - 1));
      if (label[i - 1] <= prefix_max) break;
    }
    if (i <= 1) return;
    ++label[i - 1];
    std::fill(label.begin() + static_cast<std::ptrdiff_t>(i), label.end(), 0);
  }
}

/// Optimal trees of one canonical side, each group attached to y = 0 once.
class SideOracle {
 public:
  SideOracle(std::span<const Point> pts, const OracleConfig& cfg) : pts_(pts), cfg_(cfg) {}

  SteinerGraph solve() {
    const std::size_t m = pts_.size();
    prepare();
    double best = kInf;
    std::vector<std::uint32_t> best_groups;
    for_each_partition(m, [&](const std::vector<std::uint32_t>& groups) {
      double c = 0.0;
      for (auto g : groups) c += group_cost(g);
      if (c < best) {
        best = c;
        best_groups = groups;
      }
    });
    SteinerGraph g(LineSpec::horizontal(0.0));
    for (std::size_t i = 0; i < m; ++i) g.add_node(NodeKind::Terminal, pts_[i], static_cast<int>(i));
    g.add_line_node();
    for (auto grp : best_groups) build_group(g, grp);
    return g;
  }

 private:
  struct LineFst {
    double cost = kInf;
    const Topology* topo = nullptr;
    std::vector<Point> steiner;
    Point root;
  };

  void prepare() {
    const std::uint32_t full = (1u << pts_.size()) - 1u;
    if (cfg_.method == AttachMethod::Golden) {
      golden_.assign(full + 1, {kInf, 0.0});
      for (std::uint32_t g = 1; g <= full; ++g) golden_[g] = golden_group(g);
      return;
    }
    est_ = exact_subset_costs(pts_);
    lfst_.assign(full + 1, {});
    line_.assign(full + 1, kInf);
    choice_.assign(full + 1, {0, 0});
    for (std::uint32_t g = 1; g <= full; ++g) {
      lfst_[g] = line_fst(g);
      line_[g] = lfst_[g].cost;
      // A line-attached part A and a free tree B sharing terminal h.
      for (int h : members(g)) {
        const std::uint32_t hb = 1u << h;
        const std::uint32_t rest = g & ~hb;
        if (!rest) continue;
        for (std::uint32_t a = (rest - 1) & rest;; a = (a - 1) & rest) {
          const double c = line_[a | hb] + est_[(rest & ~a) | hb];
          if (c < line_[g]) {
            line_[g] = c;
            choice_[g] = {a | hb, (rest & ~a) | hb};
          }
          if (a == 0) break;
        }
      }
    }
  }

  LineFst line_fst(std::uint32_t g) const {
    LineFst out;
    std::vector<Point> sub = subset(pts_, g);
    const std::size_t k = sub.size();
    if (k == 1) {
      out.cost = sub[0].y;
      out.root = Point::unchecked(sub[0].x, 0.0);
      return out;
    }
    double mx = 0.0;
    for (const auto& p : sub) mx += p.x / static_cast<double>(k);
    sub.push_back(Point::unchecked(mx, 0.0));  // placeholder for the free root
    for (const Topology& topo : enumerate_full_topologies_cached(k + 1)) {
      auto r = melzak_realize(sub, topo, k, true);
      if (r && r->cost < out.cost) out = {r->cost, &topo, std::move(r->steiner), r->root};
    }
    return out;
  }

  static const std::vector<Topology>& enumerate_full_topologies_cached(std::size_t n) {
    static const std::vector<std::vector<Topology>> cache = [] {
      std::vector<std::vector<Topology>> c(kOracleMaxEsfl + 2);
      for (std::size_t i = 2; i < c.size(); ++i) c[i] = enumerate_full_topologies(i);
      return c;
    }();
    return cache.at(n);
  }

  double group_cost(std::uint32_t g) const {
    return cfg_.method == AttachMethod::Golden ? golden_[g].first : line_[g];
  }

  // Golden-section search over the attachment x, started in equal
  // sub-brackets of the pyramid base of the group.
  std::pair<double, double> golden_group(std::uint32_t g) const {
    const std::vector<Point> sub = subset(pts_, g);
    const double h = height(sub);
    double lo = sub[0].x, hi = sub[0].x;
    for (const auto& p : sub) {
      lo = std::min(lo, p.x);
      hi = std::max(hi, p.x);
    }
    lo -= h * kCot30;
    hi += h * kCot30;
    std::vector<Point> ext = sub;
    ext.emplace_back(0.0, 0.0);
    auto f = [&](double x) {
      ext.back() = Point::unchecked(x, 0.0);
      return solve_exact(ext).cost;
    };
    const double tol = cfg_.golden_tol_rel * std::max(1.0, hi - lo);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const int starts = std::max(1, cfg_.golden_starts);
    std::pair<double, double> best{kInf, 0.0};
    for (int s = 0; s < starts; ++s) {
      double a = lo + (hi - lo) * s / starts;
      double b = lo + (hi - lo) * (s + 1) / starts;
      double c = b - invphi * (b - a), d = a + invphi * (b - a);
      double fc = f(c), fd = f(d);
      while (b - a > tol) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - invphi * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + invphi * (b - a);
          fd = f(d);
        }
      }
      const double x = 0.5 * (a + b);
      const double v = f(x);
      if (v < best.first) best = {v, x};
    }
    return best;
  }

  void build_group(SteinerGraph& g, std::uint32_t grp) const {
    if (cfg_.method == AttachMethod::Golden) {
      std::vector<Point> ext = subset(pts_, grp);
      const Point at = Point::unchecked(golden_[grp].second, 0.0);
      ext.push_back(at);
      const EstSolution est = solve_exact(ext);
      const std::vector<int> term = members(grp);
      const int anchor = static_cast<int>(term.size());
      std::vector<int> id(est.graph.node_count(), -1);
      for (const auto& n : est.graph.nodes()) {
        if (n.kind == NodeKind::Steiner) {
          id[static_cast<std::size_t>(n.id)] = g.add_node(NodeKind::Steiner, *n.position);
        } else if (n.source != anchor) {
          id[static_cast<std::size_t>(n.id)] = term[static_cast<std::size_t>(n.source)];
        }
      }
      for (const auto& e : est.graph.edges()) {
        const int u = id[static_cast<std::size_t>(e.u)], v = id[static_cast<std::size_t>(e.v)];
        if (u < 0 || v < 0) {
          g.add_line_edge(u < 0 ? v : u, at);
        } else {
          g.add_edge(u, v);
        }
      }
      return;
    }
    if (choice_[grp].first != 0) {
      build_group(g, choice_[grp].first);
      const std::uint32_t b = choice_[grp].second;
      add_tree(g, solve_exact(subset(pts_, b)), b);
      return;
    }
    const LineFst& f = lfst_[grp];
    const std::vector<int> term = members(grp);
    if (!f.topo) {
      g.add_line_edge(term.front(), f.root);
      return;
    }
    const std::size_t k = term.size();
    std::vector<int> id(term.begin(), term.end());
    id.push_back(-1);  // the root on the line
    for (const auto& p : f.steiner) id.push_back(g.add_node(NodeKind::Steiner, p));
    for (auto [u, v] : f.topo->edges) {
      const int iu = id[static_cast<std::size_t>(u)], iv = id[static_cast<std::size_t>(v)];
      if (static_cast<std::size_t>(u) == k || static_cast<std::size_t>(v) == k) {
        g.add_line_edge(iu < 0 ? iv : iu, f.root);
      } else {
        g.add_edge(iu, iv);
      }
    }
  }

  std::span<const Point> pts_;
  OracleConfig cfg_;
  std::vector<double> est_;
  std::vector<LineFst> lfst_;
  std::vector<double> line_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> choice_;  // (line part, free part)
  std::vector<std::pair<double, double>> golden_;                 // (cost, attachment x)
};

}  // namespace

EsflSolution solve_esfl_exact(const Instance& inst, const OracleConfig& cfg) {
  if (!inst.line) throw Error(ErrorCode::MissingLine, "ESfL needs a line");
  if (inst.size() > kOracleMaxEsfl) {
    throw Error(ErrorCode::TooLarge, std::to_string(inst.size()) + " terminals exceed the oracle limit of " +
                                         std::to_string(kOracleMaxEsfl));
  }
  const Canonicalization canon = canonicalize(inst);
  std::vector<CanonicalPiece> pieces;
  for (std::size_t s = 0; s < canon.sides.size(); ++s) {
    const auto& pts = canon.sides[s].instance.terminals;
    std::vector<std::size_t> all(pts.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    pieces.push_back({s, std::move(all), SideOracle(pts, cfg).solve()});
  }
  EsflSolution sol;
  sol.graph = assemble_pieces(inst, canon, pieces);
  sol.cost = sol.graph.total_cost();
  sol.lower_bound = canonical_lower_bound(canon);
  sol.ratio_bound = sol.lower_bound > 0.0 ? sol.cost / sol.lower_bound : 1.0;
  SolveReport& rep = sol.report;
  rep.instance_digest = instance_digest(inst);
  rep.solver_tag = cfg.method == AttachMethod::Golden ? "oracle/golden" : "oracle/analytic";
  rep.cost = sol.cost;
  rep.lower_bound = sol.lower_bound;
  rep.ratio_bound = sol.ratio_bound;
  rep.guarantee_exact = true;
  return sol;
}

EslSolution solve_esl_exact(std::span<const Point> terminals, const OracleConfig& cfg) {
  if (terminals.size() > kOracleMaxEsl) {
    throw Error(ErrorCode::TooLarge, std::to_string(terminals.size()) +
                                         " terminals exceed the ESL oracle limit of " +
                                         std::to_string(kOracleMaxEsl));
  }
  const std::vector<CandidateLine> cands = candidate_lines(terminals);
  const std::vector<Point> pts(terminals.begin(), terminals.end());
  std::vector<EsflSolution> sols;
  for (const auto& c : cands) sols.push_back(solve_esfl_exact(Instance(pts, c.line), cfg));
  return pick_best_line(cands, std::move(sols));
}

std::size_t count_downward_edges(const SteinerGraph& t, double tol) {
  const auto line = t.line_node();
  auto pos = [&](int id, const Edge& e) {
    return line && id == *line ? *e.attachment : *t.node(id).position;
  };
  std::size_t count = 0;
  for (const auto& e : t.edges()) {
    const Point p = pos(e.u, e), q = pos(e.v, e);
    const bool pu = p.y > tol, qu = q.y > tol;
    const bool pl = std::abs(p.y) <= tol, ql = std::abs(q.y) <= tol;
    if ((pu && ql) || (qu && pl)) ++count;
  }
  return count;
}

}  // namespace steiner
