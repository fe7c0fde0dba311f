#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dblacam/dblacam.hpp"
#include "dblacam/validator.hpp"

namespace dblacam {

/// Everything needed to run one planner configuration over scenarios.
struct RunnerConfig {
  std::string planner = "dblacam";  // dblacam | dbpibt
  bool incremental = false;         // outer restarts with growing primitives
  int grow = 100;                   // primitives added per restart
  PlannerConfig planner_cfg;

  int prim_count = 300;
  int prim_horizon = 20;
  uint64_t prim_seed = 1;
  std::vector<std::string> primitive_files;  // optional pre-generated sets
};

/// One primitive set per robot; robots with identical model parameters share
/// a set. Sets come from `primitive_files` when a matching model is found,
/// otherwise they are generated deterministically from prim_seed.
std::vector<std::shared_ptr<const PrimitiveSet>> primitive_sets_for(
    const Scenario& scenario, const RunnerConfig& cfg);

/// Dispatches to the configured planner with the cell's seed.
PlanResult run_planner(const Scenario& scenario, const RunnerConfig& cfg,
                       uint64_t seed);

/// Deterministic flat snapshot of the effective configuration, including
/// per-model bounds (they default from code, so replay needs them recorded).
std::map<std::string, std::string> config_snapshot(const Scenario& scenario,
                                                   const RunnerConfig& cfg,
                                                   uint64_t seed);

struct BenchOutcome {
  int cells = 0;
  int solved = 0;
  int validation_failures = 0;
  int timeout_failures = 0;
  int other_failures = 0;

  int exit_code() const {
    if (validation_failures > 0) return 2;
    if (solved == cells) return 0;
    return (other_failures == 0) ? 3 : 1;
  }
};

/// Runs every (scenario, seed) cell, validating and persisting each solution.
/// Writes out_dir/report.csv (deterministic columns only), out_dir/timing.csv
/// (wall times, timestamped), and solutions under out_dir/solutions/.
/// Rows are appended in cell order as results become available; `jobs`
/// parallel cells share immutable primitive sets only.
BenchOutcome run_bench(const std::vector<std::string>& scenario_paths,
                       const RunnerConfig& cfg,
                       const std::vector<uint64_t>& seeds,
                       const std::string& out_dir, int jobs);

std::string format_double(double v);
std::string status_name(PlanStatus s);

}  // namespace dblacam
