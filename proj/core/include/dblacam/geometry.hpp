#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dblacam/dynamics.hpp"

namespace dblacam {

struct Obstacle {
  enum class Kind { Box, Sphere };
  Kind kind = Kind::Box;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();  // Box
  double radius = 0.0;                                     // Sphere
  double yaw = 0.0;  // 2D boxes only; 3D boxes are axis-aligned
};

struct Workspace {
  int dim = 2;
  Eigen::Vector3d lower = Eigen::Vector3d::Zero();
  Eigen::Vector3d upper = Eigen::Vector3d::Zero();
  std::vector<Obstacle> obstacles;
};

/// Robot collision geometry in the body frame. The pose of the shape is
/// derived from a state: position from the position dims, yaw from the
/// heading dim when the model has one. car_with_trailer expands to two
/// boxes (body, plus trailer offset by the hitch length along -theta2).
struct CollisionShape {
  enum class Kind { Sphere, Box };
  Kind kind = Kind::Sphere;
  double radius = 0.2;
  Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();

  double bounding_radius(int dim) const;
};

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
};

/// Number of body parts a robot occupies (2 for car_with_trailer).
int body_count(const DynamicsModel& model);

/// Pose of body part `part` for a robot at state x (x given as a row or
/// vector of model.state_dim values).
Pose body_pose(const DynamicsModel& model, const Eigen::VectorXd& x, int part);

bool shapes_intersect(const CollisionShape& a, const Pose& pa,
                      const CollisionShape& b, const Pose& pb, int dim,
                      double margin = 0.0);

bool position_inside(const Workspace& ws, const Eigen::Vector3d& p);

/// Sphere-at-position probe (workspace containment plus obstacle checks);
/// used by grid heuristics and scenario generators.
bool sphere_free(const Workspace& ws, double radius,
                 const Eigen::Vector3d& center);

/// True iff the robot shape at x lies inside the workspace bounds and
/// intersects no obstacle.
bool state_free(const Workspace& ws, const CollisionShape& shape,
                const DynamicsModel& model, const State& x);

// --- rolled motions -------------------------------------------------------

/// A primitive's controls forward-propagated from a concrete robot state.
/// Dynamics-exact by construction; the discontinuity to the primitive's
/// recorded start exists only at selection time.
struct RolledMotion {
  int primitive_id = -1;
  int robot = -1;
  Eigen::MatrixXd states;    // (K+1) x state_dim
  Eigen::MatrixXd controls;  // K x control_dim
  double h = 0.0;            // cost-to-go of the final state, seconds
  double goal_distance = 0.0;  // d(final, goal); orders ties within equal h
  const DynamicsModel* model = nullptr;
  CollisionShape shape;
  Eigen::Vector3d aabb_lower = Eigen::Vector3d::Zero();  // swept, inflated
  Eigen::Vector3d aabb_upper = Eigen::Vector3d::Zero();

  int steps() const { return static_cast<int>(controls.rows()); }
  State start_state() const { return states.row(0).transpose(); }
  State final_state() const {
    return states.row(states.rows() - 1).transpose();
  }
};

/// Computes the swept AABB over all steps and body parts, inflated by the
/// shape's bounding radius. Must be called once after states are filled.
void finalize_motion_bounds(RolledMotion& m);

/// Time-synchronized robot-robot check: true iff the shapes intersect at
/// any shared step index. Both motions must have the same horizon.
bool motions_collide(const RolledMotion& a, const RolledMotion& b,
                     double margin = 0.0);

/// True iff state_free holds at every step of the motion.
bool motion_free(const Workspace& ws, const RolledMotion& m);

}  // namespace dblacam
