#include "dblacam/validator.hpp"

#include <algorithm>
#include <sstream>

namespace dblacam {

namespace {

void add(ValidationReport& r, Violation v) {
  r.ok = false;
  r.violations.push_back(std::move(v));
}

}  // namespace

ValidationReport validate(const Scenario& scenario, const Solution& solution) {
  ValidationReport report;
  const int n = scenario.robot_count();
  if (static_cast<int>(solution.robots.size()) != n) {
    add(report, {"structure", -1, -1, -1, "robot count mismatch"});
    return report;
  }

  int max_steps = 0;
  for (int i = 0; i < n; ++i) {
    const RobotSpec& spec = scenario.robots[i];
    const RobotTrajectory& t = solution.robots[i];
    const int steps = static_cast<int>(t.controls.rows());
    max_steps = std::max(max_steps, steps);
    if (t.states.rows() != steps + 1 || t.states.cols() != spec.model.state_dim ||
        (steps > 0 && t.controls.cols() != spec.model.control_dim)) {
      add(report, {"structure", i, -1, -1, "state/control shape mismatch"});
      continue;
    }
    if ((t.states.row(0).transpose().array() != spec.start.array()).any())
      add(report, {"structure", i, -1, 0, "trajectory does not begin at start"});

    for (int k = 0; k < steps; ++k) {
      const Control u = t.controls.row(k).transpose();
      if (!spec.model.control_in_bounds(u))
        add(report, {"control_bounds", i, -1, k, "control outside bounds"});
      const State expect = spec.model.step(t.states.row(k).transpose(), u);
      for (int d = 0; d < spec.model.state_dim; ++d) {
        if (expect[d] != t.states(k + 1, d)) {
          add(report, {"residual", i, -1, k, "dynamics residual at dim " +
                                             std::to_string(d)});
          break;
        }
      }
    }
    for (int k = 0; k <= steps; ++k) {
      const State x = t.states.row(k).transpose();
      if (!spec.model.state_in_bounds(x))
        add(report, {"state_bounds", i, -1, k, "state outside bounds"});
      if (!state_free(scenario.workspace, spec.shape, spec.model, x))
        add(report, {"environment", i, -1, k, "collision with environment"});
    }
    const double dist = spec.model.distance(
        t.states.row(t.states.rows() - 1).transpose(), spec.goal);
    if (dist > scenario.delta_g + 1e-9) {
      std::ostringstream os;
      os << "final distance " << dist << " exceeds delta_g " << scenario.delta_g;
      add(report, {"final_distance", i, -1, steps, os.str()});
    }
  }

  // pairwise, shorter trajectories hold their final state
  auto state_at = [&](int robot, int k) -> State {
    const auto& st = solution.robots[robot].states;
    const int last = static_cast<int>(st.rows()) - 1;
    return st.row(std::min(k, last)).transpose();
  };
  for (int k = 0; k <= max_steps; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (states_collide(scenario.robots[i].model, scenario.robots[i].shape,
                           state_at(i, k), scenario.robots[j].model,
                           scenario.robots[j].shape, state_at(j, k),
                           scenario.workspace.dim))
          add(report, {"robot_pair", i, j, k, "robot-robot collision"});
      }
    }
  }
  return report;
}

std::string format_report(const ValidationReport& report) {
  if (report.ok) return "valid\n";
  std::ostringstream os;
  os << report.violations.size() << " violation(s):\n";
  for (const auto& v : report.violations) {
    os << "  [" << v.kind << "] robot " << v.robot;
    if (v.other >= 0) os << " vs " << v.other;
    if (v.step >= 0) os << " step " << v.step;
    os << ": " << v.detail << "\n";
  }
  return os.str();
}

}  // namespace dblacam
