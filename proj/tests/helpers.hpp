#pragma once

#include <random>
#include <vector>

#include "dblacam/dblacam.hpp"
#include "dblacam/scenario.hpp"

namespace dblacam::test {

inline Workspace empty_workspace(double size = 10.0, int dim = 2) {
  Workspace ws;
  ws.dim = dim;
  ws.lower = Eigen::Vector3d::Zero();
  ws.upper = Eigen::Vector3d::Constant(size);
  if (dim == 2) ws.upper.z() = 0.0;
  return ws;
}

inline CollisionShape sphere(double r = 0.2) {
  CollisionShape s;
  s.kind = CollisionShape::Kind::Sphere;
  s.radius = r;
  return s;
}

inline CollisionShape box(double hx, double hy, double hz = 0.0) {
  CollisionShape s;
  s.kind = CollisionShape::Kind::Box;
  s.half_extents = Eigen::Vector3d(hx, hy, hz);
  return s;
}

/// Straight constant-velocity motion for a unicycle-like point robot;
/// synthesized directly (not via primitives) for collision/PIBT tests.
inline RolledMotion straight_motion(const DynamicsModel& model,
                                    const Eigen::Vector2d& from,
                                    const Eigen::Vector2d& to, int steps,
                                    const CollisionShape& shape,
                                    int robot = 0) {
  RolledMotion m;
  m.model = &model;
  m.shape = shape;
  m.robot = robot;
  m.primitive_id = 0;
  m.states.resize(steps + 1, model.state_dim);
  m.controls = Eigen::MatrixXd::Zero(steps, model.control_dim);
  const double heading = std::atan2(to.y() - from.y(), to.x() - from.x());
  for (int k = 0; k <= steps; ++k) {
    const double t = steps == 0 ? 0.0 : double(k) / steps;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.state_dim);
    x[0] = from.x() + t * (to.x() - from.x());
    x[1] = from.y() + t * (to.y() - from.y());
    if (model.heading_dim >= 0) x[model.heading_dim] = heading;
    m.states.row(k) = x;
  }
  finalize_motion_bounds(m);
  return m;
}

/// Two-robot swap instance in an empty square; solvable by construction.
inline Scenario two_unicycle_swap(double size = 4.0) {
  Scenario s;
  s.name = "swap2";
  s.workspace = empty_workspace(size);
  auto mk = [&](double x, double y, double th, double gx, double gy,
                double gth) {
    RobotSpec r;
    r.model = make_model(ModelId::Unicycle1st);
    r.shape = sphere(0.2);
    r.start = Eigen::Vector3d(x, y, th);
    r.goal = Eigen::Vector3d(gx, gy, gth);
    return r;
  };
  const double c = size / 2.0;
  s.robots.push_back(mk(c - 1.2, c, 0.0, c + 1.2, c, 0.0));
  s.robots.push_back(mk(c + 1.2, c, 3.14159265358979323846,
                        c - 1.2, c, 3.14159265358979323846));
  return s;
}

inline std::vector<std::shared_ptr<const PrimitiveSet>> shared_sets(
    const Scenario& s, int count = 300, int horizon = 20, uint64_t seed = 1) {
  std::vector<std::shared_ptr<const PrimitiveSet>> out;
  std::map<ModelId, std::shared_ptr<const PrimitiveSet>> cache;
  for (const auto& r : s.robots) {
    auto it = cache.find(r.model.id);
    if (it == cache.end()) {
      it = cache
               .emplace(r.model.id,
                        std::make_shared<const PrimitiveSet>(generate_primitives(
                            r.model, count, horizon, seed)))
               .first;
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace dblacam::test
