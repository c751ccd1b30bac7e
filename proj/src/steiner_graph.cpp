#include "steiner/steiner_graph.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "steiner/error.hpp"

namespace steiner {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Terminal: return "terminal";
    case NodeKind::Steiner: return "steiner";
    case NodeKind::LinePoint: return "line_point";
    case NodeKind::LineNode: return "line_node";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
  if (s == "terminal") return NodeKind::Terminal;
  if (s == "steiner") return NodeKind::Steiner;
  if (s == "line_point") return NodeKind::LinePoint;
  if (s == "line_node") return NodeKind::LineNode;
  return std::nullopt;
}

int SteinerGraph::add_node(NodeKind kind, const Point& pos, int source) {
  if (kind == NodeKind::LineNode) {
    throw Error(ErrorCode::InvalidArgument, "use add_line_node for the line node");
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{id, kind, pos, source});
  return id;
}

int SteinerGraph::add_line_node() {
  if (!line_) throw Error(ErrorCode::MissingLine, "graph has no line");
  if (line_node_) throw Error(ErrorCode::InvalidArgument, "line node already present");
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{id, NodeKind::LineNode, std::nullopt, -1});
  line_node_ = id;
  return id;
}

int SteinerGraph::add_edge(int u, int v) {
  const Node& a = node(u);
  const Node& b = node(v);
  if (!a.position || !b.position) {
    throw Error(ErrorCode::InvalidArgument, "add_edge needs positioned endpoints");
  }
  edges_.push_back(Edge{u, v, distance(*a.position, *b.position), std::nullopt});
  return static_cast<int>(edges_.size()) - 1;
}

int SteinerGraph::add_line_edge(int v, const Point& attachment) {
  if (!line_node_) throw Error(ErrorCode::MissingLine, "graph has no line node");
  const Node& a = node(v);
  if (!a.position) throw Error(ErrorCode::InvalidArgument, "line edge needs a positioned node");
  edges_.push_back(Edge{v, *line_node_, distance(*a.position, attachment), attachment});
  return static_cast<int>(edges_.size()) - 1;
}

int SteinerGraph::add_perpendicular_edge(int v) {
  if (!line_) throw Error(ErrorCode::MissingLine, "graph has no line");
  return add_line_edge(v, line_->foot(*node(v).position));
}

int SteinerGraph::add_raw_node(const Node& n) {
  Node copy = n;
  copy.id = static_cast<int>(nodes_.size());
  if (copy.kind == NodeKind::LineNode) {
    if (line_node_) throw Error(ErrorCode::InvalidArgument, "more than one line node");
    line_node_ = copy.id;
  }
  nodes_.push_back(copy);
  return copy.id;
}

int SteinerGraph::add_raw_edge(const Edge& e) {
  const int n = static_cast<int>(nodes_.size());
  if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  edges_.push_back(e);
  return static_cast<int>(edges_.size()) - 1;
}

std::size_t SteinerGraph::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.kind == kind; }));
}

double SteinerGraph::total_cost() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

std::vector<int> SteinerGraph::degrees() const {
  std::vector<int> deg(nodes_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

std::vector<std::vector<int>> SteinerGraph::adjacency() const {
  std::vector<std::vector<int>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  return adj;
}

bool SteinerGraph::is_tree() const {
  if (nodes_.empty()) return edges_.empty();
  if (edges_.size() + 1 != nodes_.size()) return false;
  const auto adj = adjacency();
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == nodes_.size();
}

std::vector<std::string> SteinerGraph::validate() const {
  std::vector<std::string> problems;
  if (!is_tree()) problems.emplace_back("edge set is not a spanning tree");
  if (count(NodeKind::LineNode) > 1) problems.emplace_back("more than one line node");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    const Node& a = node(e.u);
    const Node& b = node(e.v);
    const bool line_edge = a.kind == NodeKind::LineNode || b.kind == NodeKind::LineNode;
    double expected = 0.0;
    if (line_edge) {
      const Node& p = a.kind == NodeKind::LineNode ? b : a;
      if (!e.attachment || !line_ || !p.position) {
        problems.push_back("line edge " + std::to_string(i) + " lacks attachment or line");
        continue;
      }
      const double off = point_line_distance(*e.attachment, *line_);
      if (off > 1e-9 * std::max(1.0, e.attachment->norm())) {
        problems.push_back("attachment of edge " + std::to_string(i) + " is off the line");
      }
      expected = distance(*p.position, *e.attachment);
    } else {
      if (!a.position || !b.position) {
        problems.push_back("edge " + std::to_string(i) + " has an unpositioned endpoint");
        continue;
      }
      expected = distance(*a.position, *b.position);
    }
    if (!(e.length >= 0.0) || std::abs(e.length - expected) > 1e-12 * std::max(1.0, expected)) {
      std::ostringstream os;
      os << "edge " << i << " stores length " << e.length << " but endpoints give " << expected;
      problems.push_back(os.str());
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------

std::size_t ConditionReport::count(ConditionViolation::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const auto& v) { return v.kind == kind; }));
}

ConditionReport validate_steiner_conditions(const SteinerGraph& t, double tol_angle) {
  ConditionReport report;
  const auto& nodes = t.nodes();
  std::vector<std::vector<Point>> dirs(nodes.size());
  const auto deg = t.degrees();

  for (const auto& e : t.edges()) {
    const Node& a = t.node(e.u);
    const Node& b = t.node(e.v);
    if (a.kind == NodeKind::LineNode || b.kind == NodeKind::LineNode) {
      const Node& p = a.kind == NodeKind::LineNode ? b : a;
      const Point d = *e.attachment - *p.position;
      if (d.norm() == 0.0) continue;
      dirs[static_cast<std::size_t>(p.id)].push_back(d);
      if (t.line()) {
        const double along = std::abs(d.dot(t.line()->direction())) / d.norm();
        const double deviation = std::asin(std::min(1.0, along));
        if (deviation > tol_angle) {
          report.violations.push_back({p.id, ConditionViolation::Kind::Perpendicular, deviation});
        }
      }
      continue;
    }
    const Point d = *b.position - *a.position;
    if (d.norm() == 0.0) continue;
    dirs[static_cast<std::size_t>(a.id)].push_back(d);
    dirs[static_cast<std::size_t>(b.id)].push_back(d * -1.0);
  }

  constexpr double k120 = 2.0 * std::numbers::pi / 3.0;
  for (const auto& n : nodes) {
    const auto i = static_cast<std::size_t>(n.id);
    if (n.kind == NodeKind::LineNode) continue;
    if ((n.kind == NodeKind::Steiner && deg[i] != 3) ||
        (n.kind != NodeKind::Steiner && deg[i] > 3)) {
      report.violations.push_back({n.id, ConditionViolation::Kind::Degree, double(deg[i])});
    }
    double smallest = std::numbers::pi;
    const auto& d = dirs[i];
    for (std::size_t p = 0; p < d.size(); ++p) {
      for (std::size_t q = p + 1; q < d.size(); ++q) smallest = std::min(smallest, angle_between(d[p], d[q]));
    }
    if (d.size() >= 2 && smallest < k120 - tol_angle) {
      report.violations.push_back({n.id, ConditionViolation::Kind::Angle, smallest});
    }
  }
  return report;
}

}  // namespace steiner
