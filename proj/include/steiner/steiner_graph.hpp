#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "steiner/geometry.hpp"

namespace steiner {

enum class NodeKind { Terminal, Steiner, LinePoint, LineNode };

const char* to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& s);

struct Node {
  int id{};
  NodeKind kind{NodeKind::Terminal};
  std::optional<Point> position;  // absent only for the line node
  int source{-1};                 // input index for terminals / line points

  bool operator==(const Node&) const = default;
};

struct Edge {
  int u{};
  int v{};
  double length{};
  /// Where the edge meets the line; set iff one endpoint is the line node.
  std::optional<Point> attachment;

  bool operator==(const Edge&) const = default;
};

/// Geometric tree over typed nodes. Node ids are dense indices. Edges to the
/// line node carry the attachment point on the line and are priced as the
/// distance to it (the perpendicular drop when the attachment is the foot).
class SteinerGraph {
 public:
  SteinerGraph() = default;
  explicit SteinerGraph(std::optional<LineSpec> line) : line_(line) {}

  int add_node(NodeKind kind, const Point& pos, int source = -1);
  /// Adds the (single) line node; requires a line. Returns its id.
  int add_line_node();
  /// Edge between two positioned nodes, priced by Euclidean distance.
  int add_edge(int u, int v);
  /// Edge from `v` to the line node meeting the line at `attachment`.
  int add_line_edge(int v, const Point& attachment);
  /// Edge from `v` to the line node meeting it at the perpendicular foot.
  int add_perpendicular_edge(int v);
  /// Raw insertion used by deserialization; validated separately.
  int add_raw_edge(const Edge& e);
  int add_raw_node(const Node& n);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<LineSpec>& line() const { return line_; }
  std::optional<int> line_node() const { return line_node_; }

  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t count(NodeKind kind) const;

  double total_cost() const;
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;  // neighbour ids per node

  bool is_tree() const;
  /// Structural invariants: tree, lengths matching positions (1e-12 relative),
  /// at most one line node. Empty result means valid.
  std::vector<std::string> validate() const;

  bool operator==(const SteinerGraph&) const = default;

 private:
  std::optional<LineSpec> line_;
  std::optional<int> line_node_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

struct ConditionViolation {
  enum class Kind { Degree, Angle, Perpendicular };
  int node{};
  Kind kind{};
  double value{};  // offending degree, smallest angle (rad) or deviation (rad)
};

struct ConditionReport {
  std::vector<ConditionViolation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(ConditionViolation::Kind kind) const;
};

/// Degree, 120-degree angle and line-perpendicularity conditions of a Steiner
/// tree. Report-only: heuristic trees are not expected to pass.
ConditionReport validate_steiner_conditions(const SteinerGraph& t, double tol_angle = 1e-6);

}  // namespace steiner
