#include "steiner/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steiner/error.hpp"
#include "steiner/est.hpp"

namespace steiner {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Parse, origin + ": " + where + ": " + what);
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports a 1-based byte offset; turn it into line and column.
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw Error(ErrorCode::Parse, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

/// Typed access with the JSON path in error messages.
class Reader {
 public:
  Reader(const std::string& origin) : origin_(origin) {}

  const Json& field(const Json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(origin_, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin_, path, "missing \"" + key + "\"");
    return *it;
  }
  double number(const Json& v, const std::string& path) const {
    if (!v.is_number()) fail(origin_, path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(origin_, path, "number is not finite");
    return d;
  }
  long long integer(const Json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(origin_, path, "expected an integer");
    return v.get<long long>();
  }
  std::string string(const Json& v, const std::string& path) const {
    if (!v.is_string()) fail(origin_, path, "expected a string");
    return v.get<std::string>();
  }
  const Json& array(const Json& v, const std::string& path) const {
    if (!v.is_array()) fail(origin_, path, "expected an array");
    return v;
  }
  Point point(const Json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) fail(origin_, path, "expected [x, y]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }
  LineSpec line(const Json& v, const std::string& path) const {
    const double a = number(field(v, "a", path), path + ".a");
    const double b = number(field(v, "b", path), path + ".b");
    const double c = number(field(v, "c", path), path + ".c");
    if (a == 0.0 && b == 0.0) fail(origin_, path, "line needs (a, b) != (0, 0)");
    return {a, b, c};
  }
  void header(const Json& doc, const std::string& format, bool required) const {
    if (!doc.is_object()) fail(origin_, "$", "expected an object");
    if (doc.contains("format") || required) {
      const std::string f = string(field(doc, "format", "$"), "$.format");
      if (f != format) fail(origin_, "$.format", "expected \"" + format + "\", got \"" + f + "\"");
    }
    if (doc.contains("version") || required) {
      const long long v = integer(field(doc, "version", "$"), "$.version");
      if (v != kFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, origin_ + ": version " + std::to_string(v) +
                                                    ", this build reads version " +
                                                    std::to_string(kFormatVersion));
      }
    }
  }
  std::vector<Point> terminals(const Json& doc) const {
    const Json& arr = array(field(doc, "terminals", "$"), "$.terminals");
    if (arr.empty()) fail(origin_, "$.terminals", "terminal list is empty");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < arr.size(); ++i) pts.push_back(point(arr[i], "$.terminals[" + std::to_string(i) + "]"));
    return pts;
  }
  [[noreturn]] void error(const std::string& path, const std::string& what) const { fail(origin_, path, what); }

 private:
  std::string origin_;
};

Json to_json(const Point& p) { return Json::array({p.x, p.y}); }
Json to_json(const LineSpec& l) { return Json{{"a", l.a()}, {"b", l.b()}, {"c", l.c()}}; }

std::string finish_text(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// Instances

Instance parse_instance(const std::string& text, const std::string& origin) {
  const Json doc = parse_json(text, origin);
  const Reader r(origin);
  r.header(doc, "steiner-instance", false);
  std::vector<Point> pts = r.terminals(doc);
  std::optional<LineSpec> line;
  if (doc.contains("line") && !doc["line"].is_null()) line = r.line(doc["line"], "$.line");
  try {
    return Instance(std::move(pts), line);
  } catch (const Error& e) {
    r.error("$.terminals", e.what());
  }
}

std::string dump_instance(const Instance& inst) {
  Json doc{{"format", "steiner-instance"}, {"version", kFormatVersion}};
  Json pts = Json::array();
  for (const auto& p : inst.terminals) pts.push_back(to_json(p));
  doc["terminals"] = std::move(pts);
  if (inst.line) doc["line"] = to_json(*inst.line);
  return finish_text(doc);
}

Instance read_instance(const std::string& path) { return parse_instance(read_text_file(path), path); }
void write_instance(const std::string& path, const Instance& inst) { write_text_file(path, dump_instance(inst)); }

// ---------------------------------------------------------------------------
// Solutions

SteinerGraph parse_solution(const std::string& text, const std::string& origin) {
  const Json doc = parse_json(text, origin);
  const Reader r(origin);
  r.header(doc, "steiner-solution", true);
  std::optional<LineSpec> line;
  if (doc.contains("line") && !doc["line"].is_null()) line = r.line(doc["line"], "$.line");
  SteinerGraph g(line);
  const Json& nodes = r.array(r.field(doc, "nodes", "$"), "$.nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const Json& n = nodes[i];
    if (r.integer(r.field(n, "id", path), path + ".id") != static_cast<long long>(i)) {
      r.error(path + ".id", "ids must be 0, 1, 2, ... in order");
    }
    const std::string ks = r.string(r.field(n, "kind", path), path + ".kind");
    const auto kind = node_kind_from_string(ks);
    if (!kind) r.error(path + ".kind", "unknown node kind \"" + ks + "\"");
    Node node;
    node.kind = *kind;
    if (n.contains("source")) node.source = static_cast<int>(r.integer(n["source"], path + ".source"));
    if (*kind == NodeKind::LineNode) {
      if (!line) r.error(path, "line node without a line");
    } else {
      node.position = Point(r.number(r.field(n, "x", path), path + ".x"), r.number(r.field(n, "y", path), path + ".y"));
    }
    try {
      g.add_raw_node(node);
    } catch (const Error& e) {
      r.error(path, e.what());
    }
  }
  std::vector<std::optional<Point>> attach;
  const Json& edges = r.array(r.field(doc, "edges", "$"), "$.edges");
  attach.resize(edges.size());
  if (doc.contains("attachments")) {
    const Json& at = r.array(doc["attachments"], "$.attachments");
    for (std::size_t i = 0; i < at.size(); ++i) {
      const std::string path = "$.attachments[" + std::to_string(i) + "]";
      const long long e = r.integer(r.field(at[i], "edge", path), path + ".edge");
      if (e < 0 || static_cast<std::size_t>(e) >= edges.size()) r.error(path + ".edge", "edge index out of range");
      attach[static_cast<std::size_t>(e)] =
          Point(r.number(r.field(at[i], "x", path), path + ".x"), r.number(r.field(at[i], "y", path), path + ".y"));
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    const Json& e = edges[i];
    if (!e.is_array() || e.size() != 3) r.error(path, "expected [u, v, length]");
    Edge edge;
    edge.u = static_cast<int>(r.integer(e[0], path + "[0]"));
    edge.v = static_cast<int>(r.integer(e[1], path + "[1]"));
    edge.length = r.number(e[2], path + "[2]");
    edge.attachment = attach[i];
    try {
      g.add_raw_edge(edge);
    } catch (const Error& ex) {
      r.error(path, ex.what());
    }
  }
  if (auto problems = g.validate(); !problems.empty()) r.error("$", problems.front());
  return g;
}

std::string dump_solution(const SteinerGraph& g) {
  Json doc{{"format", "steiner-solution"}, {"version", kFormatVersion}};
  doc["line"] = g.line() ? to_json(*g.line()) : Json(nullptr);
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) {
    Json j{{"id", n.id}, {"kind", to_string(n.kind)}};
    if (n.position) {
      j["x"] = n.position->x;
      j["y"] = n.position->y;
    }
    if (n.source >= 0) j["source"] = n.source;
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  Json edges = Json::array(), attachments = Json::array();
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    edges.push_back(Json::array({e.u, e.v, e.length}));
    if (e.attachment) attachments.push_back(Json{{"edge", i}, {"x", e.attachment->x}, {"y", e.attachment->y}});
  }
  doc["edges"] = std::move(edges);
  doc["cost"] = g.total_cost();
  doc["attachments"] = std::move(attachments);
  return finish_text(doc);
}

SteinerGraph read_solution(const std::string& path) { return parse_solution(read_text_file(path), path); }
void write_solution(const std::string& path, const SteinerGraph& g) { write_text_file(path, dump_solution(g)); }

// ---------------------------------------------------------------------------
// Reports

namespace {

Json report_json(const SolveReport& rep, bool timings) {
  Json doc{{"format", "steiner-report"},
           {"version", kFormatVersion},
           {"instance_digest", rep.instance_digest},
           {"solver", rep.solver_tag},
           {"seed", rep.seed},
           {"epsilon", rep.epsilon},
           {"epsilon_inner", rep.epsilon_inner},
           {"cost", rep.cost},
           {"lower_bound", rep.lower_bound},
           {"ratio_bound", rep.ratio_bound},
           {"holes_before", rep.holes_before},
           {"holes_after", rep.holes_after},
           {"w_prime", rep.w_prime},
           {"width", rep.width},
           {"guarantee_exact", rep.guarantee_exact}};
  Json pieces = Json::array();
  for (const auto& p : rep.pieces) {
    pieces.push_back(Json{{"n", p.n},
                          {"width", p.width},
                          {"spacing", p.spacing},
                          {"line_points", p.line_points},
                          {"inner", to_string(p.inner)},
                          {"est_cost", p.est_cost},
                          {"filled_cost", p.filled_cost},
                          {"cost", p.cost},
                          {"w_prime", p.w_prime},
                          {"w_prime_floor", p.w_prime_floor},
                          {"lower_bound", p.lower_bound},
                          {"holes_before", p.holes_before},
                          {"holes_after", p.holes_after},
                          {"fill_steps", p.fill.step_runs},
                          {"fill_swaps", p.fill.swaps},
                          {"fill_splices", p.fill.splices},
                          {"fill_rollbacks", p.fill.rollbacks}});
  }
  doc["pieces"] = std::move(pieces);
  if (timings) {
    Json t = Json::object();
    for (const auto& [k, v] : rep.phase_seconds) t[k] = v;
    doc["phase_seconds"] = std::move(t);
  }
  return doc;
}

}  // namespace

std::string dump_report(const SolveReport& rep, bool timings) { return finish_text(report_json(rep, timings)); }

std::string dump_report(const EslSolution& sol, bool timings) {
  Json doc = report_json(sol.esfl.report, timings);
  doc["line"] = to_json(sol.line);
  doc["pair"] = sol.pair ? Json::array({sol.pair->first, sol.pair->second}) : Json(nullptr);
  doc["candidates"] = sol.candidates;
  return finish_text(doc);
}

// ---------------------------------------------------------------------------
// Gadget fixtures

GadgetFixture make_gadget(const std::string& kind, std::uint64_t seed, std::size_t n_bottom,
                          std::size_t n_top, double width, double h) {
  GadgetFixture g;
  g.kind = kind;
  g.n_bottom = n_bottom;
  g.n_top = n_top;
  g.palimest = gen_palimest(seed, n_bottom, n_top, width, h);
  if (kind == "palimest-esfl") {
    EsflGadget e = reduce_to_esfl(g.palimest);
    g.m = e.m;
    g.expected_offset = e.expected_offset;
    g.instance = std::move(e.instance);
  } else if (kind == "palimest-esl") {
    EslGadget e = reduce_to_esl(g.palimest);
    g.m = e.m;
    g.expected_offset = e.expected_offset;
    g.instance = Instance(e.terminals, e.expected_line);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown gadget kind '" + kind + "'");
  }
  g.est_opt = solve_exact(g.palimest.terminals).cost;
  g.expected_cost = g.est_opt + g.expected_offset;
  return g;
}

std::string dump_gadget(const GadgetFixture& g) {
  Json doc{{"format", "steiner-gadget"},
           {"version", kFormatVersion},
           {"kind", g.kind},
           {"seed", g.palimest.seed},
           {"n_bottom", g.n_bottom},
           {"n_top", g.n_top},
           {"width", g.palimest.width},
           {"h", g.palimest.h}};
  Json base = Json::array();
  for (const auto& p : g.palimest.terminals) base.push_back(to_json(p));
  doc["palimest"] = std::move(base);
  doc["m"] = g.m;
  doc["expected_offset"] = g.expected_offset;
  doc["est_opt"] = g.est_opt;
  doc["expected_cost"] = g.expected_cost;
  Json pts = Json::array();
  for (const auto& p : g.instance.terminals) pts.push_back(to_json(p));
  doc["terminals"] = std::move(pts);
  doc["line"] = to_json(*g.instance.line);
  return finish_text(doc);
}

GadgetFixture parse_gadget(const std::string& text, const std::string& origin) {
  const Json doc = parse_json(text, origin);
  const Reader r(origin);
  r.header(doc, "steiner-gadget", true);
  GadgetFixture g;
  g.kind = r.string(r.field(doc, "kind", "$"), "$.kind");
  if (g.kind != "palimest-esfl" && g.kind != "palimest-esl") r.error("$.kind", "unknown gadget kind");
  g.palimest.seed = static_cast<std::uint64_t>(r.integer(r.field(doc, "seed", "$"), "$.seed"));
  g.n_bottom = static_cast<std::size_t>(r.integer(r.field(doc, "n_bottom", "$"), "$.n_bottom"));
  g.n_top = static_cast<std::size_t>(r.integer(r.field(doc, "n_top", "$"), "$.n_top"));
  g.palimest.width = r.number(r.field(doc, "width", "$"), "$.width");
  g.palimest.h = r.number(r.field(doc, "h", "$"), "$.h");
  const Json& base = r.array(r.field(doc, "palimest", "$"), "$.palimest");
  for (std::size_t i = 0; i < base.size(); ++i) {
    g.palimest.terminals.push_back(r.point(base[i], "$.palimest[" + std::to_string(i) + "]"));
  }
  if (auto problems = g.palimest.check(); !problems.empty()) r.error("$.palimest", problems.front());
  g.m = r.number(r.field(doc, "m", "$"), "$.m");
  g.expected_offset = r.number(r.field(doc, "expected_offset", "$"), "$.expected_offset");
  g.est_opt = r.number(r.field(doc, "est_opt", "$"), "$.est_opt");
  g.expected_cost = r.number(r.field(doc, "expected_cost", "$"), "$.expected_cost");
  try {
    g.instance = Instance(r.terminals(doc), r.line(r.field(doc, "line", "$"), "$.line"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    r.error("$.terminals", e.what());
  }
  return g;
}

GadgetFixture read_gadget(const std::string& path) { return parse_gadget(read_text_file(path), path); }

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v + 0.0);
  return buf;
}

}  // namespace

std::string render_svg(const SteinerGraph& g) {
  std::vector<Point> extent;
  for (const auto& n : g.nodes()) {
    if (n.position) extent.push_back(*n.position);
  }
  for (const auto& e : g.edges()) {
    if (e.attachment) extent.push_back(*e.attachment);
  }
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!extent.empty()) {
    x0 = x1 = extent[0].x;
    y0 = y1 = extent[0].y;
    for (const auto& p : extent) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double mx = 0.1 * std::max(x1 - x0, span * 0.1), my = 0.1 * std::max(y1 - y0, span * 0.1);
  x0 -= mx;
  x1 += mx;
  y0 -= my;
  y1 += my;
  const double stroke = 0.004 * span, r = 0.012 * span;
  // SVG y grows downwards; flip so that the picture matches the plane.
  auto X = [&](double x) { return fmt(x); };
  auto Y = [&](double y) { return fmt(-y); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(x0) << ' ' << fmt(-y1) << ' '
      << fmt(x1 - x0) << ' ' << fmt(y1 - y0) << "\" width=\"800\" height=\""
      << fmt(800.0 * (y1 - y0) / (x1 - x0)) << "\">\n";
  out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(-y1) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
      << fmt(y1 - y0) << "\" fill=\"white\"/>\n";
  if (g.line()) {
    const LineSpec& l = *g.line();
    Point p, q;
    if (std::abs(l.b()) >= std::abs(l.a())) {
      p = Point::unchecked(x0, (l.c() - l.a() * x0) / l.b());
      q = Point::unchecked(x1, (l.c() - l.a() * x1) / l.b());
    } else {
      p = Point::unchecked((l.c() - l.b() * y0) / l.a(), y0);
      q = Point::unchecked((l.c() - l.b() * y1) / l.a(), y1);
    }
    out << "<line class=\"gamma\" x1=\"" << X(p.x) << "\" y1=\"" << Y(p.y) << "\" x2=\"" << X(q.x) << "\" y2=\""
        << Y(q.y) << "\" stroke=\"#888888\" stroke-width=\"" << fmt(2.0 * stroke) << "\"/>\n";
  }
  for (const auto& e : g.edges()) {
    const Node& a = g.node(e.u);
    const Node& b = g.node(e.v);
    const Point p = a.position ? *a.position : *e.attachment;
    const Point q = b.position ? *b.position : *e.attachment;
    out << "<line class=\"" << (e.attachment ? "attach" : "edge") << "\" x1=\"" << X(p.x) << "\" y1=\"" << Y(p.y)
        << "\" x2=\"" << X(q.x) << "\" y2=\"" << Y(q.y) << "\" stroke=\"black\" stroke-width=\"" << fmt(stroke)
        << "\"/>\n";
  }
  for (const auto& n : g.nodes()) {
    if (!n.position) continue;
    const std::string cx = X(n.position->x), cy = Y(n.position->y);
    switch (n.kind) {
      case NodeKind::Terminal:
        out << "<circle class=\"terminal\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << fmt(r)
            << "\" fill=\"black\"/>\n";
        break;
      case NodeKind::Steiner:
        out << "<circle class=\"steiner\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << fmt(0.8 * r)
            << "\" fill=\"#2ca02c\"/>\n";
        break;
      case NodeKind::LinePoint:
        out << "<circle class=\"linepoint\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << fmt(0.6 * r)
            << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << fmt(0.5 * stroke) << "\"/>\n";
        break;
      case NodeKind::LineNode: break;
    }
  }
  out << "</svg>\n";
  return out.str();
}

void emit_svg(const std::string& path, const SteinerGraph& g) { write_text_file(path, render_svg(g)); }

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

}  // namespace steiner
