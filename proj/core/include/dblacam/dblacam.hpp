#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <vector>

#include "dblacam/clustering.hpp"
#include "dblacam/dbpibt.hpp"
#include "dblacam/heuristics.hpp"
#include "dblacam/primitives.hpp"
#include "dblacam/scenario.hpp"
#include "dblacam/timing.hpp"

namespace dblacam {

struct PlannerConfig {
  ClusterConfig cluster;
  HeuristicMode heuristic_mode = HeuristicMode::Hest;
  double nn_threshold = 1.0;  // Delta
  int est_budget = 2000;
  double grid_resolution = 0.25;
  double fallback_inflation = 2.0;

  double margin = 0.0;  // extra robot-robot clearance
  double time_limit_s = 60.0;
  long long max_iterations = -1;  // high-level expansions; -1 = unbounded
  uint64_t seed = 0;

  bool livelock = true;
  int livelock_window = 5;
  int livelock_alternations = 3;

  // Explored-table quantization; linear defaults to delta/2 when <= 0.
  double explored_res_linear = -1.0;
  double explored_res_angle = 0.39269908169872414;  // pi/8

  int horizon_cap = 500;  // standalone db-PIBT iteration cap
};

enum class PlanStatus {
  Solved,
  NoSolution,      // Open exhausted (db-LaCAM) or db-PIBT horizon failed
  Timeout,
  IterationLimit,  // max_iterations reached
  HorizonCap,      // standalone db-PIBT cap reached
};

struct PlanStats {
  long long iterations = 0;  // constraint expansions / horizons planned
  long long nodes = 1;       // high-level nodes created
  double wall_s = 0.0;
  PibtCounters pibt;
  StageTimers timers;
  long long est_calls = 0;
  long long est_expansions = 0;
  long long table_hits = 0;
  long long heuristic_queries = 0;
  std::vector<int> livelock_robots;  // ever flagged
};

struct PlanResult {
  PlanStatus status = PlanStatus::NoSolution;
  Solution solution;  // populated iff status == Solved
  PlanStats stats;
};

/// Per-robot motion preparation shared by both planners: applicable-motion
/// query, rollout + validity filtering, HEST assignment, and clustering.
/// Owns the per-robot heuristics; one instance per planner run.
class MotionPipeline {
 public:
  MotionPipeline(const Scenario& scenario,
                 std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                 const PlannerConfig& cfg, StageTimers* timers,
                 std::mt19937_64* rng);

  /// scgoc_override[i] forces SC-GOC clustering for robot i (livelock
  /// recovery); pass empty for no overrides.
  std::vector<std::vector<RolledMotion>> process(
      const std::vector<State>& joint, const std::vector<bool>& scgoc_override);

  /// Geometry half of process(): applicable query + rollout + validity
  /// filtering. Pure in the joint state, so repeat expansions of the same
  /// node can reuse the result.
  std::vector<std::vector<RolledMotion>> prepare(const std::vector<State>& joint);

  /// Heuristic + clustering half; depends on the evolving lookup tables and
  /// livelock flags, so it runs on every visit.
  std::vector<std::vector<RolledMotion>> refine(
      std::vector<std::vector<RolledMotion>> rolled,
      const std::vector<bool>& scgoc_override);

  RobotHeuristic& heuristic(int robot) { return *heuristics_[robot]; }
  const PrimitiveSet& primitives(int robot) const { return *sets_[robot]; }

 private:
  const Scenario& scenario_;
  std::vector<std::shared_ptr<const PrimitiveSet>> sets_;
  PlannerConfig cfg_;
  std::vector<std::unique_ptr<RobotHeuristic>> heuristics_;
  StageTimers* timers_;
  std::mt19937_64* rng_;
  std::vector<int> scratch_ids_;
};

// --- high-level search ------------------------------------------------------

/// One forced motion assignment; root nodes carry who = -1.
struct ConstraintNode {
  ConstraintNode* parent = nullptr;
  int who = -1;
  State where;
  RolledMotion motion;
  int depth = 0;
};

struct HighLevelNode {
  std::vector<State> state;
  std::deque<ConstraintNode*> tree;   // FIFO constraint queue
  std::deque<ConstraintNode> arena;   // owns this node's constraints
  std::vector<RolledMotion> motions;  // reservation that produced this node
  HighLevelNode* parent = nullptr;
  std::vector<int> order;             // priority order, assigned lazily
  std::vector<double> h_trace;        // per-robot h of the reserved motions
  std::vector<bool> scgoc_flags;      // livelock recovery state, inherited
};

/// Quantization key for the Explored table. Angle dims are quantized on the
/// wrapped circle (cells adjacent across +-pi collide); linear dims use
/// floor(value / resolution).
std::vector<int64_t> explored_key(const DynamicsModel& model, const State& x,
                                  double res_linear, double res_angle);
std::vector<int64_t> explored_key(const std::vector<const DynamicsModel*>& models,
                                  const std::vector<State>& joint,
                                  double res_linear, double res_angle);

/// Robots whose h deltas strictly alternate in sign over at least
/// `min_alternations` consecutive parent-chain steps within `window` nodes.
std::vector<int> livelock_flagged(const HighLevelNode* node, int window,
                                  int min_alternations);

/// db-LaCAM: lazy high-level search over joint configurations with db-PIBT
/// configuration generation and constraint trees.
PlanResult plan_dblacam(const Scenario& scenario,
                        std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                        const PlannerConfig& cfg);

/// Standalone greedy db-PIBT: one dbpibt_plan call per horizon until all
/// robots are within delta_g or the horizon cap hits.
PlanResult plan_dbpibt(const Scenario& scenario,
                       std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                       const PlannerConfig& cfg);

/// Outer restart loop that appends freshly sampled primitives between
/// db-LaCAM attempts (probabilistic-completeness mode). `grow` primitives
/// are added per restart until the time limit is spent.
PlanResult plan_incremental(const Scenario& scenario,
                            std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                            const PlannerConfig& cfg, int grow);

}  // namespace dblacam
