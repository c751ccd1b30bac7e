// Command-line front end: solvers, gadget generation, benchmarks and checks.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "steiner/error.hpp"
#include "steiner/esfl.hpp"
#include "steiner/esl.hpp"
#include "steiner/est.hpp"
#include "steiner/io.hpp"
#include "steiner/oracles.hpp"
#include "suites.hpp"

namespace {

using namespace steiner;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolve = 2;
constexpr int kExitCheck = 3;

struct Common {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool timings = false;
};

struct Outputs {
  std::string out, report, svg;
};

/// STEINER_JOBS wins over --jobs.
unsigned effective_jobs(unsigned flag) {
  const char* env = std::getenv("STEINER_JOBS");
  if (!env || !*env) return flag;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') throw CLI::ValidationError("STEINER_JOBS", std::string("not a number: ") + env);
  return static_cast<unsigned>(v);
}

/// Empty or "-" means stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void add_outputs(CLI::App* cmd, Outputs& o, bool with_report) {
  cmd->add_option("--out", o.out, "solution file (default: stdout)");
  if (with_report) cmd->add_option("--report", o.report, "report file");
  cmd->add_option("--svg", o.svg, "SVG rendering of the solution");
}

void write_outputs(const Outputs& o, const SteinerGraph& g, const std::string& report) {
  emit(o.out, dump_solution(g));
  if (!o.report.empty()) emit(o.report, report);
  if (!o.svg.empty()) emit_svg(o.svg, g);
}

// ---------------------------------------------------------------------------

struct EstArgs {
  std::string input, strategy = "exact";
  Outputs io;
};

int run_est(const EstArgs& a) {
  const Instance inst = read_instance(a.input);
  const EstSolution sol = solve_est(inst.terminals, est_strategy_from_string(a.strategy));
  const Json rep{{"format", "steiner-report"},
                 {"version", kFormatVersion},
                 {"instance_digest", instance_digest(Instance(inst.terminals))},
                 {"solver", sol.solver_tag},
                 {"optimality", to_string(sol.optimality)},
                 {"cost", sol.cost}};
  write_outputs(a.io, sol.graph, rep.dump(2) + "\n");
  return kExitOk;
}

struct EsflArgs {
  std::string input, solver = "ptas", strategy = "exact";
  double epsilon = 0.5;
  bool no_snap = false, no_fill = false;
  Outputs io;
};

EsflConfig esfl_config(const EsflArgs& a, const Common& c) {
  EsflConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.strategy = est_strategy_from_string(a.strategy);
  cfg.snap = !a.no_snap;
  cfg.fill = !a.no_fill;
  cfg.jobs = effective_jobs(c.jobs);
  return cfg;
}

int run_esfl(const EsflArgs& a, const Common& c) {
  const Instance inst = read_instance(a.input);
  if (!inst.line) throw Error(ErrorCode::MissingLine, a.input + " has no \"line\"");
  EsflSolution sol;
  if (a.solver == "ptas") sol = solve_esfl_ptas(inst, esfl_config(a, c));
  else if (a.solver == "mst") sol = solve_esfl_mst(inst);
  else sol = solve_esfl_exact(inst);
  sol.report.seed = c.seed;
  write_outputs(a.io, sol.graph, dump_report(sol.report, c.timings));
  return kExitOk;
}

int run_esl(const EsflArgs& a, const Common& c) {
  const Instance inst = read_instance(a.input);
  EslSolution sol;
  if (a.solver == "oracle") {
    sol = solve_esl_exact(inst.terminals);
  } else {
    EslConfig cfg;
    cfg.strategy = a.solver == "mst" ? EslStrategy::Mst : EslStrategy::Ptas;
    cfg.esfl = esfl_config(a, c);
    cfg.jobs = cfg.esfl.jobs;
    sol = solve_esl(inst.terminals, cfg);
  }
  sol.esfl.report.seed = c.seed;
  write_outputs(a.io, sol.esfl.graph, dump_report(sol, c.timings));
  return kExitOk;
}

struct GadgetArgs {
  std::string kind = "palimest-esfl", out;
  std::size_t n_bottom = 3, n_top = 2;
  double width = 2.0, h = 0.75;
};

int run_gadget(const GadgetArgs& a, const Common& c) {
  emit(a.out, dump_gadget(make_gadget(a.kind, c.seed, a.n_bottom, a.n_top, a.width, a.h)));
  return kExitOk;
}

struct SuiteArgs {
  std::string suite = "all", out;
  std::size_t trials = 20;
};

cli::SuiteOptions suite_options(const SuiteArgs& a, const Common& c) {
  cli::SuiteOptions o;
  o.seed = c.seed;
  o.trials = a.trials;
  o.jobs = effective_jobs(c.jobs);
  o.timings = c.timings;
  return o;
}

int run_bench(const SuiteArgs& a, const Common& c) {
  const auto names = a.suite == "all" ? cli::bench_suites() : std::vector<std::string>{a.suite};
  if (!a.out.empty()) std::filesystem::create_directories(a.out);
  for (const auto& s : names) {
    const std::string text = cli::run_bench(s, suite_options(a, c)).dump(2) + "\n";
    emit(a.out.empty() ? "" : (std::filesystem::path(a.out) / (s + ".json")).string(), text);
  }
  return kExitOk;
}

int run_check(const SuiteArgs& a, const Common& c) {
  return cli::run_check(a.suite, suite_options(a, c), std::cout) ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steiner trees with a fixed or free zero-cost line"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "seed for every random choice")->capture_default_str();
  app.add_option("--jobs", common.jobs, "worker threads, 0 for all cores (STEINER_JOBS overrides)")
      ->capture_default_str();
  app.add_flag("--timings", common.timings, "include wall-clock phase timings in reports");

  const std::vector<std::string> est_strategies{"exact", "mst", "insertion"};

  EstArgs est;
  auto* est_cmd = app.add_subcommand("est", "plain Steiner tree");
  est_cmd->add_option("--input", est.input, "instance file")->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--strategy", est.strategy)->check(CLI::IsMember(est_strategies))->capture_default_str();
  add_outputs(est_cmd, est.io, true);

  auto esfl_options = [&](CLI::App* cmd, EsflArgs& a) {
    cmd->add_option("--input", a.input, "instance file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--epsilon", a.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--solver", a.solver, "ptas, mst baseline or exact oracle")
        ->check(CLI::IsMember({"ptas", "mst", "oracle"}))
        ->capture_default_str();
    cmd->add_option("--strategy", a.strategy, "inner plain Steiner tree solver")
        ->check(CLI::IsMember(est_strategies))
        ->capture_default_str();
    cmd->add_flag("--no-snap", a.no_snap, "keep line edges at their line points");
    cmd->add_flag("--no-fill", a.no_fill, "skip hole filling");
    add_outputs(cmd, a.io, true);
  };
  EsflArgs esfl, esl;
  auto* esfl_cmd = app.add_subcommand("esfl", "Steiner tree with a fixed line");
  esfl_options(esfl_cmd, esfl);
  auto* esl_cmd = app.add_subcommand("esl", "Steiner tree with a free line");
  esfl_options(esl_cmd, esl);
  esl_cmd->add_option("--jobs", common.jobs, "worker threads (STEINER_JOBS overrides)");

  GadgetArgs gadget;
  auto* gadget_cmd = app.add_subcommand("gadget", "hardness gadget fixture");
  gadget_cmd->add_option("--kind", gadget.kind)
      ->check(CLI::IsMember({"palimest-esfl", "palimest-esl"}))
      ->capture_default_str();
  gadget_cmd->add_option("--seed", common.seed);
  gadget_cmd->add_option("--n-bottom", gadget.n_bottom)->check(CLI::PositiveNumber)->capture_default_str();
  gadget_cmd->add_option("--n-top", gadget.n_top)->capture_default_str();
  gadget_cmd->add_option("--width", gadget.width)->check(CLI::NonNegativeNumber)->capture_default_str();
  gadget_cmd->add_option("--height", gadget.h, "distance between the two terminal lines")->check(CLI::PositiveNumber)->capture_default_str();
  gadget_cmd->add_option("--out", gadget.out, "fixture file (default: stdout)");

  SuiteArgs bench, check;
  std::vector<std::string> bench_names = cli::bench_suites();
  bench_names.insert(bench_names.begin(), "all");
  auto* bench_cmd = app.add_subcommand("bench", "benchmark suites");
  bench_cmd->add_option("--suite", bench.suite)->check(CLI::IsMember(bench_names))->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials)->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "report directory (default: stdout)");
  bench_cmd->add_option("--seed", common.seed);

  auto* check_cmd = app.add_subcommand("check", "invariant suites");
  check_cmd->add_option("--suite", check.suite)->check(CLI::IsMember(cli::check_suites()))->capture_default_str();
  check_cmd->add_option("--trials", check.trials)->capture_default_str();
  check_cmd->add_option("--seed", common.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (*est_cmd) return run_est(est);
    if (*esfl_cmd) return run_esfl(esfl, common);
    if (*esl_cmd) return run_esl(esl, common);
    if (*gadget_cmd) return run_gadget(gadget, common);
    if (*bench_cmd) return run_bench(bench, common);
    if (*check_cmd) return run_check(check, common);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolve;
  }
  return kExitUsage;
}
