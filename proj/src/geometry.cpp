#include "steiner/geometry.hpp"

#include <algorithm>
#include <limits>

#include "steiner/error.hpp"

namespace steiner {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingLine: return "MissingLine";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NotCanonical: return "NotCanonical";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::TooFewTerminals: return "TooFewTerminals";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonTree: return "NonTree";
    case ErrorCode::DegenerateM: return "DegenerateM";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

Point::Point(double x_, double y_) : x(x_), y(y_) {
  if (!std::isfinite(x_) || !std::isfinite(y_)) {
    throw Error(ErrorCode::InvalidArgument, "point coordinates must be finite");
  }
}

bool approx_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------------------
// LineSpec

LineSpec::LineSpec(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "line coefficients must be finite");
  }
  const double n = std::hypot(a, b);
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "line needs (a, b) != (0, 0)");
  // Already normalized coefficients stay bit-identical, so that
  // normalization is idempotent and lines survive a file round trip.
  if (std::abs(n - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    a /= n;
    b /= n;
    c /= n;
  }
  // Treat a as zero below 1e-12 so that lines built along different routes
  // agree on the sign.
  const bool flip = std::abs(a) > 1e-12 ? a < 0.0 : b < 0.0;
  if (flip) {
    a = -a;
    b = -b;
    c = -c;
  }
  a_ = a + 0.0;  // normalizes -0.0
  b_ = b + 0.0;
  c_ = c + 0.0;
}

LineSpec LineSpec::through(const Point& p, const Point& q) {
  const Point d = q - p;
  if (d.x == 0.0 && d.y == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "line through two coincident points");
  }
  const double a = -d.y;
  const double b = d.x;
  // c from the midpoint keeps both defining points symmetric in rounding.
  const double c = a * 0.5 * (p.x + q.x) + b * 0.5 * (p.y + q.y);
  return {a, b, c};
}

Point LineSpec::foot(const Point& p) const {
  const double s = signed_distance(p);
  return Point::unchecked(p.x - s * a_, p.y - s * b_);
}

bool LineSpec::approx_equal(const LineSpec& o, double tol) const {
  const double cs = std::max({1.0, std::abs(c_), std::abs(o.c_)});
  return std::abs(a_ - o.a_) <= tol && std::abs(b_ - o.b_) <= tol &&
         std::abs(c_ - o.c_) <= tol * cs;
}

double point_line_distance(const Point& p, const LineSpec& line) {
  return std::abs(line.signed_distance(p));
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(std::vector<Point> pts, std::optional<LineSpec> l)
    : terminals(std::move(pts)), line(l) {
  if (terminals.empty()) throw Error(ErrorCode::InvalidArgument, "instance has no terminals");
  std::vector<Point> sorted = terminals;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate terminal");
  }
}

// ---------------------------------------------------------------------------
// Transforms

Point RigidTransform::apply(const Point& p) const {
  return Point::unchecked(m_[0] * p.x + m_[1] * p.y + t_[0], m_[2] * p.x + m_[3] * p.y + t_[1]);
}

Point RigidTransform::inverse(const Point& p) const {
  const double x = p.x - t_[0];
  const double y = p.y - t_[1];
  // Orthogonal matrix: inverse is the transpose.
  return Point::unchecked(m_[0] * x + m_[2] * y, m_[1] * x + m_[3] * y);
}

bool RigidTransform::is_identity(double tol) const {
  return std::abs(m_[0] - 1.0) <= tol && std::abs(m_[1]) <= tol && std::abs(m_[2]) <= tol &&
         std::abs(m_[3] - 1.0) <= tol && std::abs(t_[0]) <= tol && std::abs(t_[1]) <= tol;
}

namespace {

double coordinate_scale(const Instance& inst) {
  double s = 1.0;
  for (const auto& p : inst.terminals) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  if (inst.line) s = std::max(s, std::abs(inst.line->c()));
  return s;
}

}  // namespace

SideSplit split_by_side(const Instance& inst, double tol) {
  if (!inst.line) throw Error(ErrorCode::MissingLine, "instance has no line");
  const double eps = tol * coordinate_scale(inst);
  SideSplit out;
  for (std::size_t i = 0; i < inst.terminals.size(); ++i) {
    const double s = inst.line->signed_distance(inst.terminals[i]);
    if (std::abs(s) <= eps) {
      out.on_line.push_back(i);
    } else if (s > 0.0) {
      out.above.push_back(i);
    } else {
      out.below.push_back(i);
    }
  }
  return out;
}

Canonicalization canonicalize(const Instance& inst, double tol) {
  const SideSplit split = split_by_side(inst, tol);
  const LineSpec& l = *inst.line;
  const double a = l.a(), b = l.b(), c = l.c();

  Canonicalization out;
  out.on_line = split.on_line;
  auto make_side = [&](const std::vector<std::size_t>& idx, const RigidTransform& tf) {
    if (idx.empty()) return;
    CanonicalSide side;
    side.to_canonical = tf;
    side.original_index = idx;
    std::vector<Point> pts;
    pts.reserve(idx.size());
    for (auto i : idx) {
      Point p = tf.apply(inst.terminals[i]);
      pts.push_back(p);
    }
    side.instance = Instance(std::move(pts), LineSpec::horizontal(0.0));
    out.sides.push_back(std::move(side));
  };
  // y' = a x + b y - c is the signed distance, x' runs along the line.
  make_side(split.above, RigidTransform(b, -a, a, b, 0.0, -c));
  make_side(split.below, RigidTransform(b, -a, -a, -b, 0.0, c));
  return out;
}

double width(std::span<const Point> pts) {
  if (pts.empty()) throw Error(ErrorCode::EmptySet, "width of an empty set");
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                      [](const Point& p, const Point& q) { return p.x < q.x; });
  return hi->x - lo->x;
}

double height(std::span<const Point> pts) {
  if (pts.empty()) throw Error(ErrorCode::EmptySet, "height of an empty set");
  double h = pts.front().y;
  for (const auto& p : pts) h = std::max(h, p.y);
  return h;
}

double diameter(std::span<const Point> pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
  }
  return d;
}

double angle_between(const Point& u, const Point& v) {
  return std::atan2(std::abs(u.cross(v)), u.dot(v));
}

Point fermat_point(const Point& a, const Point& b, const Point& c) {
  if (a == b || a == c) return a;
  if (b == c) return b;
  const Point ab = b - a, ac = c - a, bc = c - b;
  const double lab = ab.norm(), lac = ac.norm(), lbc = bc.norm();
  // An angle of at least 120 degrees (cos <= -1/2) makes that vertex optimal.
  if (ab.dot(ac) <= -0.5 * lab * lac) return a;
  if ((ab * -1.0).dot(bc) <= -0.5 * lab * lbc) return b;
  if (ac.dot(bc) <= -0.5 * lac * lbc) return c;
  // Apex of the equilateral triangle erected outward on the side opposite `from`.
  auto outer_apex = [](const Point& from, const Point& p, const Point& q) {
    const Point mid = (p + q) * 0.5;
    const Point d = q - p;
    Point n = Point::unchecked(-d.y, d.x) * (std::sqrt(3.0) / 2.0);
    if (n.dot(from - mid) > 0.0) n = n * -1.0;
    return mid + n;
  };
  // The Fermat point lies on every line joining a vertex to the opposite apex;
  // those lines cross at 60 degrees, so intersecting two is well conditioned.
  const Point e = outer_apex(a, b, c);
  const Point f = outer_apex(b, c, a);
  const Point r = e - a, s = f - b;
  const double denom = r.cross(s);
  const double t = (b - a).cross(s) / denom;
  const Point p = a + r * t;
  // Nearly coincident inputs make the intersection unreliable; never return
  // anything worse than the best vertex.
  auto total = [&](const Point& q) { return distance(q, a) + distance(q, b) + distance(q, c); };
  const Point* vertex = &a;
  if (total(b) < total(*vertex)) vertex = &b;
  if (total(c) < total(*vertex)) vertex = &c;
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || total(p) > total(*vertex)) return *vertex;
  return p;
}

}  // namespace steiner
