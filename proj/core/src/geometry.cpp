#include "dblacam/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace dblacam {

namespace {

Eigen::Vector2d rotate2(const Eigen::Vector2d& v, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

bool sphere_sphere(const Eigen::Vector3d& pa, double ra,
                   const Eigen::Vector3d& pb, double rb, int dim,
                   double margin) {
  Eigen::Vector3d d = pa - pb;
  if (dim == 2) d.z() = 0.0;
  return d.norm() <= ra + rb + margin;
}

bool sphere_box(const Eigen::Vector3d& ps, double r, const Eigen::Vector3d& pb,
                const Eigen::Vector3d& he, double yaw, int dim, double margin) {
  // closest point on the (yaw-rotated about z) box to the sphere center
  Eigen::Vector3d rel = ps - pb;
  Eigen::Vector2d xy = rotate2(rel.head<2>(), -yaw);
  Eigen::Vector3d local(xy.x(), xy.y(), dim == 3 ? rel.z() : 0.0);
  Eigen::Vector3d clamped = local.cwiseMax(-he).cwiseMin(he);
  if (dim == 2) clamped.z() = local.z();
  return (local - clamped).norm() <= r + margin;
}

// Footprint SAT for two yaw-rotated rectangles centered at ca/cb.
bool rect_rect(const Eigen::Vector2d& ca, const Eigen::Vector2d& ha, double ya,
               const Eigen::Vector2d& cb, const Eigen::Vector2d& hb, double yb,
               double margin) {
  const Eigen::Vector2d axes[4] = {
      {std::cos(ya), std::sin(ya)},
      {-std::sin(ya), std::cos(ya)},
      {std::cos(yb), std::sin(yb)},
      {-std::sin(yb), std::cos(yb)},
  };
  const Eigen::Vector2d d = cb - ca;
  for (const auto& ax : axes) {
    const double ra = ha.x() * std::abs(ax.dot(axes[0])) +
                      ha.y() * std::abs(ax.dot(axes[1]));
    const double rb = hb.x() * std::abs(ax.dot(axes[2])) +
                      hb.y() * std::abs(ax.dot(axes[3]));
    if (std::abs(d.dot(ax)) > ra + rb + margin) return false;
  }
  return true;
}

bool box_box(const Eigen::Vector3d& pa, const Eigen::Vector3d& ha, double ya,
             const Eigen::Vector3d& pb, const Eigen::Vector3d& hb, double yb,
             int dim, double margin) {
  if (dim == 3) {
    // boxes rotate about z only, so the z interval separates independently
    if (std::abs(pa.z() - pb.z()) > ha.z() + hb.z() + margin) return false;
  }
  return rect_rect(pa.head<2>(), ha.head<2>(), ya, pb.head<2>(), hb.head<2>(),
                   yb, margin);
}

// Half-extent of a yaw-rotated box projected on the world axes.
Eigen::Vector3d box_world_extent(const Eigen::Vector3d& he, double yaw) {
  const double c = std::abs(std::cos(yaw)), s = std::abs(std::sin(yaw));
  return {c * he.x() + s * he.y(), s * he.x() + c * he.y(), he.z()};
}

}  // namespace

double CollisionShape::bounding_radius(int dim) const {
  if (kind == Kind::Sphere) return radius;
  return dim == 3 ? half_extents.norm() : half_extents.head<2>().norm();
}

int body_count(const DynamicsModel& model) {
  return model.id == ModelId::CarWithTrailer ? 2 : 1;
}

Pose body_pose(const DynamicsModel& model, const Eigen::VectorXd& x, int part) {
  Pose p;
  p.position.head(model.position_dim) = x.head(model.position_dim);
  if (model.heading_dim >= 0) p.yaw = x[model.heading_dim];
  if (part == 1) {
    const double theta2 = x[model.trailer_dim];
    p.position.x() -= model.hitch_length * std::cos(theta2);
    p.position.y() -= model.hitch_length * std::sin(theta2);
    p.yaw = theta2;
  }
  return p;
}

bool shapes_intersect(const CollisionShape& a, const Pose& pa,
                      const CollisionShape& b, const Pose& pb, int dim,
                      double margin) {
  using K = CollisionShape::Kind;
  if (a.kind == K::Sphere && b.kind == K::Sphere)
    return sphere_sphere(pa.position, a.radius, pb.position, b.radius, dim,
                         margin);
  if (a.kind == K::Sphere && b.kind == K::Box)
    return sphere_box(pa.position, a.radius, pb.position, b.half_extents,
                      pb.yaw, dim, margin);
  if (a.kind == K::Box && b.kind == K::Sphere)
    return sphere_box(pb.position, b.radius, pa.position, a.half_extents,
                      pa.yaw, dim, margin);
  return box_box(pa.position, a.half_extents, pa.yaw, pb.position,
                 b.half_extents, pb.yaw, dim, margin);
}

bool position_inside(const Workspace& ws, const Eigen::Vector3d& p) {
  for (int i = 0; i < ws.dim; ++i) {
    if (p[i] < ws.lower[i] || p[i] > ws.upper[i]) return false;
  }
  return true;
}

namespace {

bool posed_shape_free(const Workspace& ws, const CollisionShape& shape,
                      const Pose& pose) {
  // containment in workspace bounds
  Eigen::Vector3d ext = shape.kind == CollisionShape::Kind::Sphere
                            ? Eigen::Vector3d::Constant(shape.radius)
                            : box_world_extent(shape.half_extents, pose.yaw);
  for (int i = 0; i < ws.dim; ++i) {
    if (pose.position[i] - ext[i] < ws.lower[i] ||
        pose.position[i] + ext[i] > ws.upper[i])
      return false;
  }
  for (const auto& obs : ws.obstacles) {
    CollisionShape os;
    Pose op;
    op.position = obs.center;
    op.yaw = obs.yaw;
    if (obs.kind == Obstacle::Kind::Sphere) {
      os.kind = CollisionShape::Kind::Sphere;
      os.radius = obs.radius;
    } else {
      os.kind = CollisionShape::Kind::Box;
      os.half_extents = obs.half_extents;
    }
    if (shapes_intersect(shape, pose, os, op, ws.dim)) return false;
  }
  return true;
}

}  // namespace

bool sphere_free(const Workspace& ws, double radius,
                 const Eigen::Vector3d& center) {
  CollisionShape probe;
  probe.kind = CollisionShape::Kind::Sphere;
  probe.radius = radius;
  Pose pose;
  pose.position = center;
  return posed_shape_free(ws, probe, pose);
}

bool state_free(const Workspace& ws, const CollisionShape& shape,
                const DynamicsModel& model, const State& x) {
  const int parts = body_count(model);
  for (int part = 0; part < parts; ++part) {
    if (!posed_shape_free(ws, shape, body_pose(model, x, part))) return false;
  }
  return true;
}

void finalize_motion_bounds(RolledMotion& m) {
  const int parts = body_count(*m.model);
  const double r = m.shape.bounding_radius(m.model->position_dim);
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e30);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e30);
  for (int k = 0; k < m.states.rows(); ++k) {
    const Eigen::VectorXd x = m.states.row(k).transpose();
    for (int part = 0; part < parts; ++part) {
      const Pose p = body_pose(*m.model, x, part);
      lo = lo.cwiseMin(p.position);
      hi = hi.cwiseMax(p.position);
    }
  }
  m.aabb_lower = lo.array() - r;
  m.aabb_upper = hi.array() + r;
}

bool motions_collide(const RolledMotion& a, const RolledMotion& b,
                     double margin) {
  if (a.states.rows() != b.states.rows())
    throw std::invalid_argument("motions_collide: horizon mismatch");
  const int dim = a.model->position_dim;
  for (int i = 0; i < dim; ++i) {
    if (a.aabb_lower[i] > b.aabb_upper[i] + margin ||
        b.aabb_lower[i] > a.aabb_upper[i] + margin)
      return false;
  }
  const int pa = body_count(*a.model);
  const int pb = body_count(*b.model);
  for (int k = 0; k < a.states.rows(); ++k) {
    const Eigen::VectorXd xa = a.states.row(k).transpose();
    const Eigen::VectorXd xb = b.states.row(k).transpose();
    for (int i = 0; i < pa; ++i) {
      const Pose pia = body_pose(*a.model, xa, i);
      for (int j = 0; j < pb; ++j) {
        if (shapes_intersect(a.shape, pia, b.shape,
                             body_pose(*b.model, xb, j), dim, margin))
          return true;
      }
    }
  }
  return false;
}

bool motion_free(const Workspace& ws, const RolledMotion& m) {
  for (int k = 0; k < m.states.rows(); ++k) {
    if (!state_free(ws, m.shape, *m.model, m.states.row(k).transpose()))
      return false;
  }
  return true;
}

}  // namespace dblacam
