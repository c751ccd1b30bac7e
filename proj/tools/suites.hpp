#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace steiner::cli {

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 20;
  unsigned jobs = 1;
  bool timings = false;
};

/// Names accepted by run_bench.
const std::vector<std::string>& bench_suites();
/// One JSON document per suite: per-trial records and a summary.
nlohmann::ordered_json run_bench(const std::string& suite, const SuiteOptions& opt);

/// Names accepted by run_check, "all" included.
const std::vector<std::string>& check_suites();
/// Prints one PASS/FAIL line per check to `out`; true if all passed.
bool run_check(const std::string& suite, const SuiteOptions& opt, std::ostream& out);

}  // namespace steiner::cli
