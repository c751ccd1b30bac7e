#pragma once
/**
 * File formats (JSON, version 1) and SVG rendering.
 *
 * Instance:  {"format":"steiner-instance","version":1,
 *             "terminals":[[x,y],...],"line":{"a":..,"b":..,"c":..}}
 * Solution:  {"format":"steiner-solution","version":1,"line":{..},
 *             "nodes":[{"id","kind","x","y","source"}],"edges":[[u,v,len]],
 *             "cost":..,"attachments":[{"edge","x","y"}]}
 *
 * "format", "version" and "line" are optional when reading an instance.
 * Doubles are written in shortest round-trip form, so read(write(x)) is
 * bit-exact.
 */

#include <optional>
#include <string>
#include <vector>

#include "steiner/esfl.hpp"
#include "steiner/esl.hpp"
#include "steiner/geometry.hpp"
#include "steiner/reductions.hpp"
#include "steiner/steiner_graph.hpp"

namespace steiner {

inline constexpr int kFormatVersion = 1;

/// Parse errors carry "origin:line:column" for syntax problems and the JSON
/// path for semantic ones.
Instance parse_instance(const std::string& text, const std::string& origin = "<input>");
std::string dump_instance(const Instance& inst);
Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& inst);

SteinerGraph parse_solution(const std::string& text, const std::string& origin = "<input>");
std::string dump_solution(const SteinerGraph& g);
SteinerGraph read_solution(const std::string& path);
void write_solution(const std::string& path, const SteinerGraph& g);

/// Phase timings are included only when `timings` is set, so that reports of
/// identical runs are byte-identical by default.
std::string dump_report(const SolveReport& rep, bool timings = false);
/// Report of an ESL run: the fixed-line report plus the chosen line.
std::string dump_report(const EslSolution& sol, bool timings = false);

struct GadgetFixture {
  std::string kind;  // "palimest-esfl" or "palimest-esl"
  PalimestInstance palimest;
  std::size_t n_bottom{};
  std::size_t n_top{};
  double m{};
  double expected_offset{};
  double est_opt{};        // optimum of the two-line instance
  double expected_cost{};  // est_opt + expected_offset
  Instance instance;       // gadget instance; its line is the expected line
};

/// Builds the fixture for `kind`, solving the two-line instance exactly.
GadgetFixture make_gadget(const std::string& kind, std::uint64_t seed, std::size_t n_bottom,
                          std::size_t n_top, double width, double h);
GadgetFixture parse_gadget(const std::string& text, const std::string& origin = "<input>");
std::string dump_gadget(const GadgetFixture& g);
GadgetFixture read_gadget(const std::string& path);

/// Deterministic SVG: bounding box plus 10% margin, terminals filled black,
/// Steiner points green, line points hollow, the line in grey.
std::string render_svg(const SteinerGraph& g);
void emit_svg(const std::string& path, const SteinerGraph& g);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace steiner
