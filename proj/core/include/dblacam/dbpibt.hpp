#pragma once

#include <utility>
#include <vector>

#include "dblacam/geometry.hpp"
#include "dblacam/timing.hpp"

namespace dblacam {

/// Instrumentation for the complexity bound: collide_calls counts
/// motions_collide invocations, frames counts recursive procedure entries.
struct PibtCounters {
  long long frames = 0;
  long long motion_iterations = 0;
  long long collide_calls = 0;
};

/// Robot ids sorted by distance-to-goal descending (farthest first);
/// ties broken by id ascending.
std::vector<int> assign_priorities(
    const std::vector<const DynamicsModel*>& models,
    const std::vector<State>& states, const std::vector<State>& goals);

struct PibtResult {
  bool success = false;
  std::vector<RolledMotion> reserved;  // one motion per robot on success
};

/// One-horizon motion assignment via priority inheritance with backtracking.
///
/// Candidate lists are iterated in the given (cluster) order. Constraints
/// pre-seed the reservation table; mutually colliding constraints fail
/// immediately. Each robot enters its recursive frame at most once per call,
/// and a failed table is reported as an unsuccessful result, not an error.
PibtResult dbpibt_plan(
    const std::vector<std::vector<RolledMotion>>& motion_sets,
    const std::vector<int>& priority_order,
    const std::vector<std::pair<int, RolledMotion>>& constraints,
    double margin = 0.0, PibtCounters* counters = nullptr,
    StageTimers* timers = nullptr);

}  // namespace dblacam
