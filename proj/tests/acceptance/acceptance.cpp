// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "helpers.hpp"
#include "steiner/error.hpp"
#include "steiner/esfl.hpp"
#include "steiner/esl.hpp"
#include "steiner/est.hpp"
#include "steiner/io.hpp"
#include "steiner/oracles.hpp"
#include "steiner/reductions.hpp"

using namespace steiner;
namespace fs = std::filesystem;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kRatio = 1.2149;

struct Outcome {
  bool pass{};
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared instance sets, built once.

std::vector<Instance> baseline_instances() {
  std::mt19937_64 rng(3003);
  std::vector<Instance> out;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 5);
    out.emplace_back(testing::random_points(rng, n, -1.0, 1.0), LineSpec::horizontal(0.0));
  }
  return out;
}

std::vector<Instance> ptas_instances() {
  std::mt19937_64 rng(4004);
  std::vector<Instance> out;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 5);
    out.emplace_back(testing::random_points(rng, n, 0.0, 1.0), LineSpec::horizontal(0.0));
  }
  return out;
}

const std::vector<double> kEpsilons{0.1, 0.5, 1.0};

struct PtasRun {
  const Instance* inst;
  double eps;
  EsflSolution sol;
  double opt;
};

std::vector<PtasRun>& ptas_runs() {
  static std::vector<PtasRun> runs;
  return runs;
}

// Criteria -------------------------------------------------------------------

Outcome exact_sanity() {
  const std::vector<Point> tri{{0, 0}, {1, 0}, {0.5, kSqrt3 / 2}};
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto t0 = std::chrono::steady_clock::now();
  const double a = solve_exact(tri).cost;
  const double ta = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const double b = solve_exact(sq).cost;
  const double tb = seconds_since(t0);
  const bool ok = std::abs(a - kSqrt3) <= 1e-9 && std::abs(b - (1 + kSqrt3)) <= 1e-9 && ta < 1 && tb < 1;
  return {ok, fmt("triangle %.12f (%.3fs), square %.12f (%.3fs)", a, ta, b, tb)};
}

Outcome steiner_ratio() {
  std::mt19937_64 rng(2002);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto pts = testing::random_points(rng, 3 + static_cast<std::size_t>(i % 5));
    worst = std::max(worst, solve_mst(pts).cost / solve_exact(pts).cost);
  }
  const double t = seconds_since(t0);
  return {worst <= kRatio && t < 120, fmt("1000 instances, worst mst/exact %.6f, %.1fs", worst, t)};
}

Outcome esfl_baseline(const std::vector<Instance>& set) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& inst : set) worst = std::max(worst, solve_esfl_mst(inst).cost / solve_esfl_exact(inst).cost);
  const double t = seconds_since(t0);
  return {worst <= kRatio && t < 300, fmt("%zu instances, worst mst/oracle %.6f, %.1fs", set.size(), worst, t)};
}

Outcome ptas_guarantee(const std::vector<Instance>& set) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double eps : kEpsilons) {
    double worst = 0.0;
    for (const auto& inst : set) {
      EsflConfig cfg;
      cfg.epsilon = eps;
      PtasRun run{&inst, eps, solve_esfl_ptas(inst, cfg), solve_esfl_exact(inst).cost};
      const double r = run.sol.cost / run.opt;
      worst = std::max(worst, r);
      ok = ok && r <= 1 + eps + 1e-6;
      ptas_runs().push_back(std::move(run));
    }
    detail += fmt("eps %.1f worst %.6f; ", eps, worst);
  }
  const double t = seconds_since(t0);
  return {ok && t < 900, detail + fmt("%.1fs", t)};
}

/// Adversarial hole-filling inputs: n terminals, n/eps slots.
struct StressInput {
  DiscretizedInstance disc;
  SteinerGraph tree;
};

StressInput stress_input(std::size_t n, std::size_t slots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pts = testing::random_points(rng, n, 0.05, 0.5);
  pts[0].x = 0.0;
  pts[1].x = 1.0;
  const double eps = static_cast<double>(n) / static_cast<double>(slots);
  StressInput s{discretize(Instance(pts, LineSpec::horizontal(0.0)), eps), {}};
  s.tree = hole_stress_tree(s.disc);
  return s;
}

std::vector<StressInput>& stress_fixtures() {
  static std::vector<StressInput> f = [] {
    std::vector<StressInput> v;
    std::uint64_t seed = 500;
    for (std::size_t n : {2, 3, 5}) {
      for (std::size_t slots : {20, 60, 150}) v.push_back(stress_input(n, slots, seed++));
    }
    return v;
  }();
  return f;
}

Outcome hole_bound() {
  std::size_t pieces = 0, worst_slack = 0;
  bool ok = true;
  for (const auto& run : ptas_runs()) {
    for (const auto& p : run.sol.report.pieces) {
      ++pieces;
      ok = ok && p.holes_after <= 10 * p.n;
      worst_slack = std::max(worst_slack, p.holes_after);
    }
  }
  std::size_t adversarial_max = 0;
  for (const auto& s : stress_fixtures()) {
    const SteinerGraph out = fill_holes(s.tree, s.disc);
    const std::size_t h = count_holes(out, s.disc).holes;
    ok = ok && h <= 10 * s.disc.real_terminals.size();
    adversarial_max = std::max(adversarial_max, h);
  }
  return {ok && !ptas_runs().empty(),
          fmt("%zu pipeline pieces (max %zu holes), %zu adversarial inputs (max %zu holes)", pieces, worst_slack,
              stress_fixtures().size(), adversarial_max)};
}

/// Checks the output of one fill_holes call; returns an empty string when fine.
std::string fill_contract_violation(const SteinerGraph& in, const DiscretizedInstance& d) {
  FillStats st;
  const SteinerGraph out = fill_holes(in, d, {}, &st);
  if (!out.is_tree()) return "output is not a tree";
  if (out.total_cost() > in.total_cost() * (1 + 1e-9)) return "weight increased";
  const auto deg = out.degrees();
  for (const auto& node : out.nodes()) {
    if (node.kind == NodeKind::Steiner && deg[static_cast<std::size_t>(node.id)] != 3) return "Steiner degree != 3";
  }
  const std::size_t cap = d.slots() + 1;
  for (std::size_t k = 0; k < st.step_runs.size(); ++k) {
    if (st.step_runs[k] > cap) return fmt("step %zu ran %zu times, cap %zu", k + 1, st.step_runs[k], cap);
  }
  return {};
}

Outcome fill_contracts() {
  std::size_t runs = 0;
  std::string bad;
  // The pipeline's own fill_holes inputs, rebuilt stage by stage.
  for (const auto& run : ptas_runs()) {
    for (const auto& piece : decompose(*run.inst)) {
      const DiscretizedInstance d = discretize(piece, run.eps / kEpsilonDivisor);
      const EstSolution est = solve_est(d.est_terminals(), EstStrategy::ExactIfSmall);
      const std::string v = fill_contract_violation(label_line_points(est.graph, d), d);
      ++runs;
      if (!v.empty() && bad.empty()) bad = v;
    }
  }
  for (const auto& s : stress_fixtures()) {
    const std::string v = fill_contract_violation(s.tree, s.disc);
    ++runs;
    if (!v.empty() && bad.empty()) bad = v;
  }
  return {bad.empty() && runs > 0, fmt("%zu fill_holes runs%s%s", runs, bad.empty() ? "" : ", first violation: ",
                                       bad.c_str())};
}

Outcome width_bound(const std::vector<Instance>& baseline, const std::vector<Instance>& ptas) {
  std::size_t pieces = 0;
  double worst = 0.0;
  auto visit = [&](const Instance& inst) {
    for (const auto& side : canonicalize(inst).sides) {
      for (const auto& piece : decompose(side.instance)) {
        ++pieces;
        worst = std::max(worst, width(piece.terminals) / solve_esfl_exact(piece).cost);
      }
    }
  };
  for (const auto& inst : baseline) visit(inst);
  for (const auto& inst : ptas) visit(inst);
  return {worst <= kWidthRatio * (1 + 1e-12),
          fmt("%zu pieces, worst width/opt %.6f (bound %.6f)", pieces, worst, kWidthRatio)};
}

std::vector<GadgetFixture> load_fixtures(const char* prefix, int count) {
  std::vector<GadgetFixture> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(read_gadget(fmt("%s/%s_%02d.json", STEINER_FIXTURES, prefix, i)));
  }
  return out;
}

Outcome esfl_gadgets() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fixtures = load_fixtures("esfl_gadget", 20);
  double worst = 0.0;
  bool ok = true;
  for (const auto& g : fixtures) {
    ok = ok && g.instance.size() <= 5;
    const double est = solve_exact(g.palimest.terminals).cost;
    ok = ok && std::abs(est - g.est_opt) <= 1e-9 && est < kSqrt2 * g.m;
    const EsflSolution s = solve_esfl_exact(g.instance);
    const double diff = std::abs(s.cost - (est + kSqrt2 * g.m));
    worst = std::max(worst, diff);
    ok = ok && diff <= 1e-6;
    std::size_t attachments = 0;
    for (const auto& e : s.graph.edges()) {
      if (!e.attachment) continue;
      ++attachments;
      ok = ok && distance(*e.attachment, Point(-g.m, -g.m)) <= 1e-6;
    }
    ok = ok && attachments == 1;
  }
  const double t = seconds_since(t0);
  return {ok && t < 600, fmt("%zu fixtures, max |oracle - (est + sqrt2 M)| %.2e, %.2fs", fixtures.size(), worst, t)};
}

Outcome esl_gadgets() {
  const auto fixtures = load_fixtures("esl_gadget", 10);
  double worst = 0.0;
  bool ok = true;
  for (const auto& g : fixtures) {
    ok = ok && g.palimest.terminals.size() <= 3;
    const EslSolution s = solve_esl_exact(g.instance.terminals);
    const LineSpec expected(1, 1, -2 * g.m);
    ok = ok && s.line.approx_equal(expected, 1e-9) && g.instance.line->approx_equal(expected, 1e-9);
    const double diff = std::abs(s.cost - (solve_exact(g.palimest.terminals).cost + kSqrt2 * g.m));
    worst = std::max(worst, diff);
    ok = ok && diff <= 1e-6;
  }
  return {ok, fmt("%zu fixtures, line x + y = -2M every time, max cost error %.2e", fixtures.size(), worst)};
}

Outcome downward_edges() {
  std::mt19937_64 rng(1010);
  std::size_t worst = 0;
  for (int i = 0; i < 100; ++i) {
    auto pts = testing::random_points(rng, 2, 0.05, 1.0);
    const std::size_t on_line = 3 + static_cast<std::size_t>(i % 3);
    while (pts.size() < 2 + on_line) {
      const Point p(unit_uniform(rng()), 0.0);
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    worst = std::max(worst, count_downward_edges(solve_exact(pts).graph));
  }
  return {worst <= 4, fmt("100 instances, max downward edges %zu", worst)};
}

Outcome observation1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Observation1Report r = check_observation1(1000000, 100.0, 1);
  const double t = seconds_since(t0);
  return {r.positive && r.min_g > 0 && t < 5,
          fmt("min g = %.6f at a = %.6f over %zu samples, %.2fs", r.min_g, r.argmin, r.samples, t)};
}

Outcome fill_scaling() {
  const std::vector<std::size_t> sizes{50, 100, 200, 400};
  std::vector<double> lx, ly;
  std::string detail;
  for (std::size_t slots : sizes) {
    const StressInput s = stress_input(5, slots, 700 + slots);
    if (s.disc.slots() != slots) return {false, fmt("discretization gave %zu slots for %zu", s.disc.slots(), slots)};
    // Repeat until at least 0.2 s so that short runs are measurable.
    std::size_t reps = 0;
    const auto t0 = std::chrono::steady_clock::now();
    do {
      (void)fill_holes(s.tree, s.disc);
      ++reps;
    } while (seconds_since(t0) < 0.2);
    const double per = seconds_since(t0) / static_cast<double>(reps);
    lx.push_back(std::log(static_cast<double>(slots)));
    ly.push_back(std::log(per));
    detail += fmt("%zu: %.2e s; ", slots, per);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope <= 3.3, detail + fmt("log-log slope %.2f", slope)};
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && read_text_file(a.string()) == read_text_file(b.string());
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt("steiner_acceptance_%d", static_cast<int>(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = STEINER_CLI;

  write_instance((dir / "plain.json").string(),
                 Instance({{0, 0}, {1, 0.2}, {0.4, 0.9}, {1.2, 1.1}, {0.6, 0.4}}));
  write_instance((dir / "fixed.json").string(),
                 Instance({{0, 1}, {0.7, 0.6}, {1.5, 1.3}, {0.2, -0.5}, {1.1, -0.8}}, LineSpec(0.1, 1, 0)));
  write_instance((dir / "free.json").string(), Instance({{0, 0}, {1, 0.3}, {0.4, 1.1}, {1.3, 1.0}}));

  struct Command {
    std::string name;
    std::string args;                 // {out} expands to the run directory
    std::vector<std::string> files;  // produced files to compare
  };
  const std::string in = (dir / "").string();
  const std::vector<Command> cmds{
      {"est", "est --input " + in + "plain.json --out {out}/sol.json --report {out}/rep.json --svg {out}/sol.svg",
       {"sol.json", "rep.json", "sol.svg"}},
      {"esfl", "--seed 9 esfl --input " + in +
                   "fixed.json --epsilon 0.5 --out {out}/sol.json --report {out}/rep.json --svg {out}/sol.svg",
       {"sol.json", "rep.json", "sol.svg"}},
      {"esfl-oracle", "esfl --solver oracle --input " + in + "fixed.json --out {out}/sol.json --report {out}/rep.json",
       {"sol.json", "rep.json"}},
      {"esl", "--jobs 2 esl --input " + in + "free.json --epsilon 1 --out {out}/sol.json --report {out}/rep.json",
       {"sol.json", "rep.json"}},
      {"gadget", "gadget --kind palimest-esl --seed 5 --n-bottom 2 --n-top 1 --out {out}/g.json", {"g.json"}},
      {"bench", "bench --suite all --trials 3 --seed 4 --out {out}/bench", {"bench/est.json", "bench/esfl.json",
                                                                           "bench/fill.json", "bench/esl.json"}},
      {"check", "check --suite observation1 --trials 3 > {out}/check.txt", {"check.txt"}},
  };
  std::string bad;
  for (const auto& c : cmds) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = dir / c.name / run;
      fs::create_directories(out);
      std::string args = c.args;
      for (std::size_t p; (p = args.find("{out}")) != std::string::npos;) args.replace(p, 5, out.string());
      const std::string line = cli + " " + args + (c.name == "check" ? "" : " > /dev/null");
      if (std::system(line.c_str()) != 0 && bad.empty()) bad = c.name + " failed to run";
    }
    for (const auto& f : c.files) {
      if (!same_bytes(dir / c.name / "a" / f, dir / c.name / "b" / f) && bad.empty()) bad = c.name + ": " + f;
    }
  }
  fs::remove_all(dir);
  return {bad.empty(), bad.empty() ? fmt("%zu subcommand invocations byte-identical", cmds.size())
                                   : "differs or failed: " + bad};
}

}  // namespace

int main() {
  const std::vector<Instance> baseline = baseline_instances();
  const std::vector<Instance> ptas = ptas_instances();

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact EST sanity", exact_sanity},
      {"Steiner ratio of the MST", steiner_ratio},
      {"fixed-line MST baseline ratio", [&] { return esfl_baseline(baseline); }},
      {"PTAS within 1 + eps of the oracle", [&] { return ptas_guarantee(ptas); }},
      {"at most 10n holes after filling", hole_bound},
      {"fill_holes contracts", fill_contracts},
      {"piece width bound", [&] { return width_bound(baseline, ptas); }},
      {"fixed-line gadget optimum", esfl_gadgets},
      {"free-line gadget optimum", esl_gadgets},
      {"at most 4 downward edges", downward_edges},
      {"gadget inequality g(a) > 0", observation1},
      {"fill_holes scaling", fill_scaling},
      {"CLI determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
