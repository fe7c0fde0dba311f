#include "dblacam/scenario_gen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dblacam {

namespace {
constexpr double kPi = 3.14159265358979323846;

RobotSpec make_unicycle(double x, double y, double theta, double gx, double gy,
                        double gtheta, double radius = 0.2) {
  RobotSpec r;
  r.model = make_model(ModelId::Unicycle1st);
  r.shape.kind = CollisionShape::Kind::Sphere;
  r.shape.radius = radius;
  r.start = Eigen::Vector3d(x, y, wrap_angle(theta));
  r.goal = Eigen::Vector3d(gx, gy, wrap_angle(gtheta));
  return r;
}

}  // namespace

Scenario gen_circle(int n, double radius, uint64_t /*seed*/) {
  if (n < 2) throw std::invalid_argument("circle: need at least 2 robots");
  Scenario s;
  s.name = "circle-n" + std::to_string(n);
  const double border = 1.0;
  const double c = radius + border;
  s.workspace.dim = 2;
  s.workspace.lower = Eigen::Vector3d::Zero();
  s.workspace.upper = Eigen::Vector3d(2 * c, 2 * c, 0.0);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    const double sx = c + radius * std::cos(phi);
    const double sy = c + radius * std::sin(phi);
    const double gx = c - radius * std::cos(phi);
    const double gy = c - radius * std::sin(phi);
    const double heading = std::atan2(gy - sy, gx - sx);
    s.robots.push_back(make_unicycle(sx, sy, heading, gx, gy, heading));
  }
  check_scenario(s);
  return s;
}

Scenario gen_random2d(int n, double size, double density, uint64_t seed) {
  Scenario s;
  s.name = "random2d-n" + std::to_string(n) + "-s" + std::to_string(seed);
  s.workspace.dim = 2;
  s.workspace.lower = Eigen::Vector3d::Zero();
  s.workspace.upper = Eigen::Vector3d(size, size, 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double covered = 0.0;
  const double target = density * size * size;
  int guard = 0;
  while (covered < target && ++guard < 10000) {
    Obstacle o;
    o.kind = Obstacle::Kind::Box;
    const double hx = 0.3 + 0.5 * unit(rng);
    const double hy = 0.3 + 0.5 * unit(rng);
    o.half_extents = Eigen::Vector3d(hx, hy, 0.0);
    o.center = Eigen::Vector3d(hx + (size - 2 * hx) * unit(rng),
                               hy + (size - 2 * hy) * unit(rng), 0.0);
    s.workspace.obstacles.push_back(o);
    covered += 4.0 * hx * hy;
  }

  const double robot_radius = 0.2;
  auto sample_free = [&](const std::vector<State>& others,
                         double clearance) -> State {
    for (int attempt = 0; attempt < 20000; ++attempt) {
      const double x = robot_radius + (size - 2 * robot_radius) * unit(rng);
      const double y = robot_radius + (size - 2 * robot_radius) * unit(rng);
      if (!sphere_free(s.workspace, robot_radius, {x, y, 0.0})) continue;
      bool clear = true;
      for (const auto& o : others) {
        const double d = std::hypot(x - o[0], y - o[1]);
        if (d < 2 * robot_radius + clearance) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      const double theta = wrap_angle(-kPi + 2 * kPi * unit(rng));
      return Eigen::Vector3d(x, y, theta);
    }
    throw std::runtime_error("random2d: rejection sampling exhausted");
  };

  std::vector<State> starts, goals;
  for (int i = 0; i < n; ++i) starts.push_back(sample_free(starts, 0.1));
  for (int i = 0; i < n; ++i) goals.push_back(sample_free(goals, 0.8));
  for (int i = 0; i < n; ++i) {
    s.robots.push_back(make_unicycle(starts[i][0], starts[i][1], starts[i][2],
                                     goals[i][0], goals[i][1], goals[i][2],
                                     robot_radius));
  }
  check_scenario(s);
  return s;
}

Scenario gen_headon2(uint64_t /*seed*/) {
  Scenario s;
  s.name = "headon2";
  s.workspace.dim = 2;
  const double length = 6.0;
  const double width = 1.6;
  s.workspace.lower = Eigen::Vector3d::Zero();
  s.workspace.upper = Eigen::Vector3d(length, width, 0.0);
  const double y = width / 2.0;
  const double r = 0.3;
  s.robots.push_back(make_unicycle(1.5, y, 0.0, 4.5, y, 0.0, r));
  s.robots.push_back(make_unicycle(4.5, y, kPi, 1.5, y, kPi, r));
  check_scenario(s);
  return s;
}

Scenario gen_swap_hetero(int n, uint64_t /*seed*/) {
  if (n < 2) throw std::invalid_argument("swap-hetero: need at least 2 robots");
  Scenario s;
  s.name = "swap-hetero-n" + std::to_string(n);
  const double radius = std::max(2.0, 0.5 * n);
  const double border = 1.0;
  const double c = radius + border;
  s.workspace.dim = 2;
  s.workspace.lower = Eigen::Vector3d::Zero();
  s.workspace.upper = Eigen::Vector3d(2 * c, 2 * c, 0.0);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    const double sx = c + radius * std::cos(phi);
    const double sy = c + radius * std::sin(phi);
    const double gx = c - radius * std::cos(phi);
    const double gy = c - radius * std::sin(phi);
    if (i % 2 == 0) {
      const double heading = std::atan2(gy - sy, gx - sx);
      s.robots.push_back(make_unicycle(sx, sy, heading, gx, gy, heading));
    } else {
      RobotSpec r;
      r.model = make_model(ModelId::DoubleIntegrator2d);
      r.shape.kind = CollisionShape::Kind::Box;
      r.shape.half_extents = Eigen::Vector3d(0.2, 0.2, 0.0);
      r.start = Eigen::Vector4d(sx, sy, 0.0, 0.0);
      r.goal = Eigen::Vector4d(gx, gy, 0.0, 0.0);
      s.robots.push_back(std::move(r));
    }
  }
  check_scenario(s);
  return s;
}

}  // namespace dblacam
