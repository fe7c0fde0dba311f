#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dblacam/geometry.hpp"
#include "dblacam/kdtree.hpp"

namespace dblacam {

struct GenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptPrimitiveFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A dynamics-consistent state/control sequence in canonical form: the
/// position dims of the first state are zero. Headings and velocities stay
/// explicit; applicability is resolved on the translation-reduced start.
struct MotionPrimitive {
  int id = -1;
  Eigen::MatrixXd states;    // (K+1) x state_dim
  Eigen::MatrixXd controls;  // K x control_dim
};

/// Immutable set of uniform-horizon primitives with a k-d index over the
/// translation-reduced start states. Safe to share across planner instances.
class PrimitiveSet {
 public:
  PrimitiveSet() = default;
  PrimitiveSet(DynamicsModel model, int horizon,
               std::vector<MotionPrimitive> primitives);

  const DynamicsModel& model() const { return model_; }
  int horizon() const { return horizon_; }
  int size() const { return static_cast<int>(primitives_.size()); }
  const MotionPrimitive& at(int i) const { return primitives_[i]; }
  const std::vector<MotionPrimitive>& primitives() const { return primitives_; }

  /// Ids of primitives whose reduced start state is within `radius` of x's
  /// reduced state (the alpha*delta discontinuity bound). Exact w.r.t. a
  /// linear scan.
  std::vector<int> applicable(const State& x, double radius) const;
  void applicable(const State& x, double radius, std::vector<int>& out) const;

  /// Appends more primitives (incremental-primitive mode); reindexes.
  void append(std::vector<MotionPrimitive> extra);

 private:
  void reindex();

  DynamicsModel model_;
  int horizon_ = 0;
  std::vector<MotionPrimitive> primitives_;
  KdTree start_index_;
};

/// Samples `count` distinct canonicalized primitives with piecewise-constant
/// random controls (2-4 segments). Stay primitives are injected first where
/// the model admits a fixed point. Deterministic given the seed; primitives
/// whose final states are closer than 0.01 under the model metric are
/// rejected and resampled. Throws GenerationExhausted after 100x count
/// attempts.
PrimitiveSet generate_primitives(const DynamicsModel& model, int count,
                                 int horizon, uint64_t seed);

void save_set(const PrimitiveSet& set, const std::string& path);

/// Loads and re-validates: version/model tags must match, every primitive
/// must have a bitwise-zero dynamics residual and in-bounds controls.
PrimitiveSet load_set(const std::string& path);

/// Forward-propagates each candidate primitive's controls from x, keeping
/// motions that stay within state bounds and are environment-free. Results
/// are dynamics-exact from x; h is left unassigned.
std::vector<RolledMotion> rollout_applicable(
    const DynamicsModel& model, const Workspace& ws,
    const CollisionShape& shape, const State& x, const PrimitiveSet& set,
    const std::vector<int>& candidate_ids, int robot_id);

}  // namespace dblacam
