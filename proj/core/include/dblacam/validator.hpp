#pragma once

#include <string>
#include <vector>

#include "dblacam/scenario.hpp"

namespace dblacam {

struct Violation {
  std::string kind;  // residual | control_bounds | state_bounds |
                     // environment | robot_pair | final_distance | structure
  int robot = -1;
  int other = -1;  // second robot for pair violations
  int step = -1;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Independent solution check against the scenario: re-integrates every
/// control sequence with the dynamics module and requires a bitwise-zero
/// residual, control/state bounds, per-step environment freedom, per-step
/// pairwise robot freedom (shorter trajectories hold their final state),
/// and final distances within delta_g (+1e-9).
///
/// Touches only the dynamics and geometry primitives; no planner code.
ValidationReport validate(const Scenario& scenario, const Solution& solution);

std::string format_report(const ValidationReport& report);

}  // namespace dblacam
