#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

#include "steiner/error.hpp"
#include "steiner/esfl.hpp"
#include "steiner/esl.hpp"
#include "steiner/est.hpp"
#include "steiner/io.hpp"
#include "steiner/oracles.hpp"
#include "steiner/parallel.hpp"
#include "steiner/reductions.hpp"

namespace steiner::cli {

using Json = nlohmann::ordered_json;

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

/// Points in [0, 1] x [y_lo, y_hi].
std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, double y_lo, double y_hi) {
  std::vector<Point> pts;
  while (pts.size() < n) {
    const Point p(unit_uniform(rng()), y_lo + (y_hi - y_lo) * unit_uniform(rng()));
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }
  return pts;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr double kRatioBound = 1.2149;
constexpr double kEpsilons[] = {1.0, 0.5, 0.1};

// ---------------------------------------------------------------------------
// Benchmarks

Json bench_est(const SuiteOptions& opt) {
  std::vector<Json> rec(opt.trials);
  parallel_for(opt.trials, opt.jobs, [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const auto pts = random_points(rng, 3 + i % 5, 0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const double exact = solve_exact(pts).cost;
    const double t_exact = seconds_since(t0);
    const double mst = solve_mst(pts).cost;
    const double ins = solve_insertion(pts).cost;
    rec[i] = Json{{"trial", i}, {"n", pts.size()}, {"exact", exact}, {"mst", mst}, {"insertion", ins},
                  {"mst_ratio", mst / exact}};
    if (opt.timings) rec[i]["exact_seconds"] = t_exact;
  });
  double worst = 0.0;
  for (const auto& r : rec) worst = std::max(worst, r["mst_ratio"].get<double>());
  return Json{{"suite", "est"}, {"records", rec}, {"summary", {{"max_mst_ratio", worst}}}};
}

Json bench_esfl(const SuiteOptions& opt) {
  std::vector<Json> rec(opt.trials);
  parallel_for(opt.trials, opt.jobs, [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const Instance inst(random_points(rng, 1 + i % 5, 0.05, 1.0), LineSpec::horizontal(0.0));
    EsflConfig cfg;
    cfg.epsilon = kEpsilons[i % 3];
    const auto t0 = std::chrono::steady_clock::now();
    const EsflSolution ptas = solve_esfl_ptas(inst, cfg);
    const double t_ptas = seconds_since(t0);
    const double oracle = solve_esfl_exact(inst).cost;
    const double mst = solve_esfl_mst(inst).cost;
    rec[i] = Json{{"trial", i},         {"n", inst.size()},
                  {"epsilon", cfg.epsilon}, {"oracle", oracle},
                  {"ptas", ptas.cost},     {"mst", mst},
                  {"lower_bound", ptas.lower_bound}, {"holes_after", ptas.report.holes_after},
                  {"ptas_ratio", ptas.cost / oracle}, {"mst_ratio", mst / oracle}};
    if (opt.timings) rec[i]["ptas_seconds"] = t_ptas;
  });
  double wp = 0.0, wm = 0.0;
  for (const auto& r : rec) {
    wp = std::max(wp, r["ptas_ratio"].get<double>());
    wm = std::max(wm, r["mst_ratio"].get<double>());
  }
  return Json{{"suite", "esfl"}, {"records", rec}, {"summary", {{"max_ptas_ratio", wp}, {"max_mst_ratio", wm}}}};
}

Json bench_fill(const SuiteOptions& opt) {
  const std::size_t n = 5;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i) / (n - 1), 0.3 + 0.1 * static_cast<double>(i));
  const Instance inst(pts, LineSpec::horizontal(0.0));
  std::vector<Json> rec;
  for (std::size_t slots : {50u, 100u, 200u, 400u}) {
    const DiscretizedInstance disc = discretize(inst, static_cast<double>(n) / static_cast<double>(slots));
    const SteinerGraph t = hole_stress_tree(disc);
    FillStats st;
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t reps = std::max<std::size_t>(1, opt.trials);
    for (std::size_t r = 0; r < reps; ++r) fill_holes(t, disc, {}, &st);
    const double dt = seconds_since(t0) / static_cast<double>(reps);
    Json j{{"slots", disc.slots()},          {"holes_before", st.holes_before}, {"holes_after", st.holes_after},
           {"weight_before", st.weight_before}, {"weight_after", st.weight_after}, {"step_runs", st.step_runs}};
    if (opt.timings) j["seconds"] = dt;
    rec.push_back(std::move(j));
  }
  return Json{{"suite", "fill"}, {"records", rec}};
}

Json bench_esl(const SuiteOptions& opt) {
  std::vector<Json> rec(opt.trials);
  parallel_for(opt.trials, opt.jobs, [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const auto pts = random_points(rng, 2 + i % 3, 0.0, 1.0);
    EslConfig cfg;
    const EslSolution ptas = solve_esl(pts, cfg);
    cfg.strategy = EslStrategy::Mst;
    const double mst = solve_esl(pts, cfg).cost;
    const double oracle = solve_esl_exact(pts).cost;
    rec[i] = Json{{"trial", i}, {"n", pts.size()}, {"oracle", oracle}, {"ptas", ptas.cost}, {"mst", mst}};
  });
  return Json{{"suite", "esl"}, {"records", rec}};
}

// ---------------------------------------------------------------------------
// Checks

struct Outcome {
  bool ok = true;
  std::string detail;
};

void report(std::ostream& out, const std::string& name, const Outcome& o, bool& all) {
  out << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
  all = all && o.ok;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Runs f on every trial and keeps the worst value; f returns (value, ok).
Outcome over_trials(const SuiteOptions& opt, const std::string& label,
                    const std::function<std::pair<double, bool>(std::size_t)>& f) {
  std::vector<std::pair<double, bool>> res(opt.trials);
  parallel_for(opt.trials, opt.jobs, [&](std::size_t i) { res[i] = f(i); });
  Outcome o;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [v, ok] : res) {
    worst = std::max(worst, v);
    o.ok = o.ok && ok;
  }
  o.detail = label + " " + num(worst) + " over " + std::to_string(opt.trials) + " trials";
  return o;
}

Outcome observation1_outcome() {
  const Observation1Report r = check_observation1(1000000, 100.0);
  const double far = std::min(observation1_g(1e6), observation1_g(-1e6));
  return {r.positive && far > 0.0, "min g " + num(r.min_g) + " at a = " + num(r.argmin)};
}

Outcome check_steiner_ratio(const SuiteOptions& opt) {
  return over_trials(opt, "max mst/exact", [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const auto pts = random_points(rng, 3 + i % 5, 0.0, 1.0);
    const double r = solve_mst(pts).cost / solve_exact(pts).cost;
    return std::pair{r, r <= kRatioBound};
  });
}

Outcome check_esfl_baseline(const SuiteOptions& opt) {
  return over_trials(opt, "max mst/oracle", [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const Instance inst(random_points(rng, 1 + i % 5, 0.05, 1.0), LineSpec::horizontal(0.0));
    const EsflSolution o = solve_esfl_exact(inst);
    const double r = solve_esfl_mst(inst).cost / o.cost;
    const auto pieces = decompose(inst);
    const bool width_ok = std::all_of(pieces.begin(), pieces.end(), [](const Instance& piece) {
      return width(piece.terminals) <= kWidthRatio * solve_esfl_exact(piece).cost * (1.0 + 1e-9);
    });
    return std::pair{r, r <= kRatioBound && o.cost >= o.lower_bound * (1.0 - 1e-9) && width_ok};
  });
}

Outcome check_ptas(const SuiteOptions& opt) {
  return over_trials(opt, "max (ptas/oracle - 1)/epsilon", [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    const Instance inst(random_points(rng, 1 + i % 5, 0.05, 1.0), LineSpec::horizontal(0.0));
    EsflConfig cfg;
    cfg.epsilon = kEpsilons[i % 3];
    const EsflSolution s = solve_esfl_ptas(inst, cfg);
    const double oracle = solve_esfl_exact(inst).cost;
    bool ok = s.cost <= (1.0 + cfg.epsilon) * oracle + 1e-6 && s.graph.is_tree();
    for (const auto& p : s.report.pieces) {
      ok = ok && p.holes_after <= 10 * p.n && p.fill.weight_after <= p.fill.weight_before * (1.0 + 1e-9);
      const std::size_t cap = p.line_points;  // slots + 1
      for (auto runs : p.fill.step_runs) ok = ok && runs <= cap;
    }
    return std::pair{(s.cost / oracle - 1.0) / cfg.epsilon, ok};
  });
}

Outcome check_downward_edges(const SuiteOptions& opt) {
  return over_trials(opt, "max downward edges", [&](std::size_t i) {
    auto rng = trial_rng(opt.seed, i);
    std::vector<Point> pts = random_points(rng, 2, 0.05, 1.0);
    const std::size_t k = 3 + i % 3;
    for (std::size_t j = 0; j < k; ++j) pts.emplace_back(static_cast<double>(j) / (k - 1), 0.0);
    const auto c = static_cast<double>(count_downward_edges(solve_exact(pts).graph));
    return std::pair{c, c <= 4.0};
  });
}

Outcome check_gadgets(const SuiteOptions& opt) {
  return over_trials(opt, "max |oracle - expected|", [&](std::size_t i) {
    const std::size_t nb = 1 + i % 3, nt = 1 + (i / 3) % 2;
    const GadgetFixture g = make_gadget("palimest-esfl", opt.seed + i, nb, nt, 2.0, 0.75);
    const EsflSolution o = solve_esfl_exact(g.instance);
    std::size_t attachments = 0;
    for (const auto& e : o.graph.edges()) {
      if (e.attachment) {
        ++attachments;
        if (distance(*e.attachment, Point(-g.m, -g.m)) > 1e-6) attachments += 100;
      }
    }
    const double d = std::abs(o.cost - g.expected_cost);
    return std::pair{d, d <= 1e-6 && attachments == 1};
  });
}

}  // namespace

const std::vector<std::string>& bench_suites() {
  static const std::vector<std::string> s{"est", "esfl", "fill", "esl"};
  return s;
}

Json run_bench(const std::string& suite, const SuiteOptions& opt) {
  Json doc;
  if (suite == "est") doc = bench_est(opt);
  else if (suite == "esfl") doc = bench_esfl(opt);
  else if (suite == "fill") doc = bench_fill(opt);
  else if (suite == "esl") doc = bench_esl(opt);
  else throw Error(ErrorCode::InvalidArgument, "unknown bench suite '" + suite + "'");
  Json out{{"format", "steiner-bench"}, {"version", kFormatVersion}, {"seed", opt.seed}, {"trials", opt.trials}};
  out.update(doc);
  return out;
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> s{"all", "observation1", "steiner-ratio", "esfl-baseline",
                                          "ptas", "downward-edges", "gadgets"};
  return s;
}

bool run_check(const std::string& suite, const SuiteOptions& opt, std::ostream& out) {
  bool all = true;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (want("observation1")) report(out, "observation1", observation1_outcome(), all);
  if (want("steiner-ratio")) report(out, "steiner-ratio", check_steiner_ratio(opt), all);
  if (want("esfl-baseline")) report(out, "esfl-baseline", check_esfl_baseline(opt), all);
  if (want("ptas")) report(out, "ptas", check_ptas(opt), all);
  if (want("downward-edges")) report(out, "downward-edges", check_downward_edges(opt), all);
  if (want("gadgets")) report(out, "gadgets", check_gadgets(opt), all);
  return all;
}

}  // namespace steiner::cli
