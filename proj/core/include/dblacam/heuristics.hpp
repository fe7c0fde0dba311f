#pragma once

#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "dblacam/geometry.hpp"
#include "dblacam/kdtree.hpp"
#include "dblacam/primitives.hpp"

namespace dblacam {

struct InvalidGoal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Position-space Dijkstra field from the goal over a uniform workspace
/// grid (8/26-connected, Euclidean edge costs). Cells are blocked when the
/// robot's bounding sphere at the cell center is not collision-free.
class GridWavefront {
 public:
  GridWavefront(const Workspace& ws, double robot_radius,
                const Eigen::Vector3d& goal_position, double resolution);

  /// Grid distance in meters; falls back to the straight-line distance for
  /// blocked or unreachable cells (a valid lower bound either way).
  double distance_at(const Eigen::Vector3d& p) const;
  bool goal_blocked() const { return goal_blocked_; }
  double resolution() const { return resolution_; }

 private:
  int cell_index(const Eigen::Vector3d& p) const;

  int dim_;
  double resolution_;
  Eigen::Vector3d origin_;
  Eigen::Vector3d goal_;
  int nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<double> dist_;
  std::vector<bool> blocked_;
  bool goal_blocked_ = false;
};

enum class HeuristicMode { Hest, ReverseGridOnly };

struct HestConfig {
  HeuristicMode mode = HeuristicMode::Hest;
  double nn_threshold = 1.0;       // Delta: reuse radius for table lookups
  int est_budget = 2000;           // expansions per forward estimate
  double density_radius = 0.5;
  double fallback_inflation = 2.0;
  double grid_resolution = 0.25;
  double goal_tolerance = 0.3;     // delta_g
  double applicable_radius = 0.5;  // alpha * delta
  bool strict_goal = true;         // throw InvalidGoal on in-collision goals
};

/// Per-robot hierarchical cost-to-go estimator: a coarse reverse wavefront
/// over the workspace plus an on-demand forward Guided-EST refinement that
/// caches solved states in a nearest-neighbor table.
///
/// Owned by one planner instance; not safe for concurrent mutation.
class RobotHeuristic {
 public:
  RobotHeuristic(const DynamicsModel& model, const Workspace& ws,
                 CollisionShape shape, State goal,
                 std::shared_ptr<const PrimitiveSet> primitives,
                 HestConfig config);

  /// Coarse position-only estimate in seconds (grid distance / v_max).
  double reverse_estimate(const State& x) const;

  /// Forward Guided EST from x. On success returns the found path duration
  /// and inserts every solution-path state into the table; on budget
  /// exhaustion returns reverse_estimate(x) * fallback_inflation without
  /// touching the table.
  double forward_estimate(const State& x, std::mt19937_64& rng);

  /// The full lookup path: 0 within goal tolerance, table reuse within the
  /// threshold, forward EST otherwise.
  double query(const State& x, std::mt19937_64& rng);

  /// Assigns h to every motion's final state (the per-motion batch query).
  void assign(std::vector<RolledMotion>& motions, std::mt19937_64& rng);

  struct Stats {
    long long queries = 0;
    long long goal_hits = 0;
    long long table_hits = 0;
    long long est_calls = 0;
    long long est_expansions = 0;
    long long fallbacks = 0;
  };
  const Stats& stats() const { return stats_; }
  int table_size() const { return table_.size(); }
  const State& goal() const { return goal_; }

 private:
  void insert_entry(const State& x, double h);
  /// Lower-envelope value over table entries within the reuse threshold;
  /// negative when no entry is in reach.
  double table_lookup(const State& x) const;

  const DynamicsModel& model_;
  const Workspace& ws_;
  CollisionShape shape_;
  State goal_;
  std::shared_ptr<const PrimitiveSet> primitives_;
  HestConfig cfg_;
  GridWavefront wavefront_;
  double v_max_;

  KdTree table_;               // merged reverse/forward store over full states
  std::vector<double> table_h_;
  std::vector<State> table_states_;
  Stats stats_;
  mutable std::vector<int> scratch_ids_;
};

}  // namespace dblacam
