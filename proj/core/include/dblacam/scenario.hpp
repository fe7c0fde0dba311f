#pragma once

#include <map>
#include <string>
#include <vector>

#include "dblacam/geometry.hpp"

namespace dblacam {

struct RobotSpec {
  DynamicsModel model;
  CollisionShape shape;
  State start;
  State goal;
};

struct Scenario {
  std::string name;
  Workspace workspace;
  std::vector<RobotSpec> robots;
  double delta = 0.5;    // discontinuity bound
  double alpha = 1.0;    // applicability radius scale (alpha * delta)
  double delta_g = 0.3;  // goal tolerance under the model metric

  int robot_count() const { return static_cast<int>(robots.size()); }
  std::vector<State> starts() const;
  std::vector<State> goals() const;
};

/// Single-state robot-robot intersection (used for start/goal checks).
bool states_collide(const DynamicsModel& ma, const CollisionShape& sa,
                    const State& xa, const DynamicsModel& mb,
                    const CollisionShape& sb, const State& xb, int dim,
                    double margin = 0.0);

/// Enforces the scenario invariants: bounds sane, starts pairwise- and
/// environment-free, goals in-bounds with zero velocity for double
/// integrators, and v_max*dt below the smallest shape extent (discrete-time
/// tunneling guard). Throws std::invalid_argument on violation.
void check_scenario(const Scenario& s);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

struct RobotTrajectory {
  Eigen::MatrixXd states;    // (K_i+1) x state_dim
  Eigen::MatrixXd controls;  // K_i x control_dim
  double cost_s = 0.0;       // K_i * dt after trailing-stay trimming
};

struct Solution {
  std::vector<RobotTrajectory> robots;
  double cost_s = 0.0;
  // metadata (kept deterministic: no wall-clock values)
  std::string planner;
  std::string scenario_name;
  uint64_t seed = 0;
  long long expansions = 0;
  std::map<std::string, std::string> config;
};

Solution load_solution(const std::string& path);
void save_solution(const Solution& s, const std::string& path);

}  // namespace dblacam
