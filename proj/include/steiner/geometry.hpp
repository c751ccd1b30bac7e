#pragma once
/**
 * Planar primitives shared by every solver: points, normalized lines,
 * problem instances, rigid transforms into the canonical frame (line y = 0,
 * terminals above it) and the width/height measures of a point set.
 *
 * All geometry is double precision. Relative comparisons default to 1e-9.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace steiner {

inline constexpr double kRelTol = 1e-9;
/// 1 / tan(30 deg); the slope of the pyramid flanks used by decomposition.
inline constexpr double kCot30 = std::numbers::sqrt3;

struct Point {
  double x{0.0};
  double y{0.0};

  Point() = default;
  /// Throws Error(InvalidArgument) on a non-finite coordinate.
  Point(double x_, double y_);

  Point operator+(const Point& o) const { return unchecked(x + o.x, y + o.y); }
  Point operator-(const Point& o) const { return unchecked(x - o.x, y - o.y); }
  Point operator*(double s) const { return unchecked(x * s, y * s); }
  bool operator==(const Point&) const = default;

  double norm() const { return std::hypot(x, y); }
  double dot(const Point& o) const { return x * o.x + y * o.y; }
  double cross(const Point& o) const { return x * o.y - y * o.x; }

  /// Skips the finiteness check; for arithmetic on already validated values.
  static Point unchecked(double x_, double y_) {
    Point p;
    p.x = x_;
    p.y = y_;
    return p;
  }
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Lexicographic (x, then y) order.
inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

/// The line { (x, y) | a x + b y = c }, stored with a^2 + b^2 = 1 and the
/// first nonzero of (a, b) positive.
class LineSpec {
 public:
  /// Throws Error(InvalidArgument) when (a, b) = (0, 0) or a value is not finite.
  LineSpec(double a, double b, double c);

  static LineSpec horizontal(double y0) { return {0.0, 1.0, y0}; }
  static LineSpec through(const Point& p, const Point& q);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  /// a x + b y - c; positive on the side the normal (a, b) points to.
  double signed_distance(const Point& p) const { return a_ * p.x + b_ * p.y - c_; }
  Point foot(const Point& p) const;
  /// Unit direction along the line.
  Point direction() const { return Point::unchecked(b_, -a_); }

  bool operator==(const LineSpec&) const = default;
  /// Component-wise equality within `tol` scaled by max(1, |c|).
  bool approx_equal(const LineSpec& o, double tol = kRelTol) const;

 private:
  double a_, b_, c_;
};

double point_line_distance(const Point& p, const LineSpec& line);

struct Instance {
  std::vector<Point> terminals;
  std::optional<LineSpec> line;

  Instance() = default;
  /// Rejects an empty or duplicated terminal list with Error(InvalidArgument).
  explicit Instance(std::vector<Point> pts, std::optional<LineSpec> l = std::nullopt);

  std::size_t size() const { return terminals.size(); }
};

/// Orientation-preserving or reflecting isometry x' = R x + t.
class RigidTransform {
 public:
  RigidTransform() = default;
  RigidTransform(double m00, double m01, double m10, double m11, double tx, double ty)
      : m_{m00, m01, m10, m11}, t_{tx, ty} {}

  Point apply(const Point& p) const;
  Point inverse(const Point& p) const;
  bool is_reflection() const { return m_[0] * m_[3] - m_[1] * m_[2] < 0.0; }
  bool is_identity(double tol = 0.0) const;

 private:
  double m_[4]{1.0, 0.0, 0.0, 1.0};
  double t_[2]{0.0, 0.0};
};

/// Terminals of one side of the line, expressed in the canonical frame.
struct CanonicalSide {
  Instance instance;  // line y = 0, every terminal strictly above
  RigidTransform to_canonical;
  std::vector<std::size_t> original_index;  // instance.terminals[i] came from input[original_index[i]]
};

struct Canonicalization {
  std::vector<CanonicalSide> sides;  // 0, 1 or 2 entries; the side above the normal first
  std::vector<std::size_t> on_line;  // input terminals already on the line (connected for free)
};

/// Maps an ESfL instance to the frame where the line is y = 0. Terminals on
/// opposite sides become independent sub-instances (the lower one reflected);
/// terminals within `tol` of the line are recorded as pre-satisfied.
/// Throws Error(MissingLine) if the instance has no line.
Canonicalization canonicalize(const Instance& inst, double tol = 1e-12);

/// Terminals on each side of the line, in input order.
struct SideSplit {
  std::vector<std::size_t> above, below, on_line;
};
SideSplit split_by_side(const Instance& inst, double tol = 1e-12);

/// max |x - x'| over the set. Throws Error(EmptySet).
double width(std::span<const Point> pts);
/// max y over the set. Throws Error(EmptySet).
double height(std::span<const Point> pts);
/// Largest pairwise distance (0 for fewer than two points).
double diameter(std::span<const Point> pts);

/// Point minimizing the summed distance to a, b, c (Torricelli point, or the
/// vertex whose angle is at least 120 degrees).
Point fermat_point(const Point& a, const Point& b, const Point& c);

/// Angle in [0, pi] between vectors u and v.
double angle_between(const Point& u, const Point& v);

bool approx_equal(double a, double b, double rel = kRelTol);

}  // namespace steiner
