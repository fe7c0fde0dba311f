#include "dblacam/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace dblacam {

namespace {
constexpr double kUnbounded = 1e30;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::Unicycle1st: return "unicycle_1st";
    case ModelId::DoubleIntegrator2d: return "double_integrator_2d";
    case ModelId::DoubleIntegrator3d: return "double_integrator_3d";
    case ModelId::CarWithTrailer: return "car_with_trailer";
  }
  throw std::logic_error("unknown model id");
}

ModelId model_id_from_string(const std::string& name) {
  if (name == "unicycle_1st") return ModelId::Unicycle1st;
  if (name == "double_integrator_2d") return ModelId::DoubleIntegrator2d;
  if (name == "double_integrator_3d") return ModelId::DoubleIntegrator3d;
  if (name == "car_with_trailer") return ModelId::CarWithTrailer;
  throw std::invalid_argument("unknown dynamics model: " + name);
}

double wrap_angle(double a) {
  double w = a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
  if (w >= kPi) w = -kPi;  // guard against floating-point edge at +pi
  return w;
}

Eigen::VectorXd DynamicsModel::deriv(const State& x, const Control& u) const {
  Eigen::VectorXd dx(state_dim);
  switch (id) {
    case ModelId::Unicycle1st:
      dx << u[0] * std::cos(x[2]), u[0] * std::sin(x[2]), u[1];
      break;
    case ModelId::DoubleIntegrator2d:
      dx << x[2], x[3], u[0], u[1];
      break;
    case ModelId::DoubleIntegrator3d:
      dx << x[3], x[4], x[5], u[0], u[1], u[2];
      break;
    case ModelId::CarWithTrailer:
      dx << u[0] * std::cos(x[2]), u[0] * std::sin(x[2]),
          u[0] / wheelbase * std::tan(u[1]),
          u[0] / hitch_length * std::sin(x[2] - x[3]);
      break;
  }
  return dx;
}

State DynamicsModel::step(const State& x, const Control& u) const {
  check_state(x);
  check_control(u);
  State next = x + deriv(x, u) * dt;
  for (int i = 0; i < state_dim; ++i) {
    if (angle_wrap[i]) next[i] = wrap_angle(next[i]);
  }
  return next;
}

RolloutResult DynamicsModel::rollout(const State& x0,
                                     const Eigen::MatrixXd& controls) const {
  check_state(x0);
  const auto steps = static_cast<int>(controls.rows());
  RolloutResult out;
  out.states.resize(steps + 1, state_dim);
  out.states.row(0) = x0;
  out.in_bounds = state_in_bounds(x0);
  State x = x0;
  for (int k = 0; k < steps; ++k) {
    x = step(x, controls.row(k).transpose());
    out.states.row(k + 1) = x;
    if (!state_in_bounds(x)) out.in_bounds = false;
  }
  return out;
}

double DynamicsModel::distance(const State& a, const State& b) const {
  check_state(a);
  check_state(b);
  // Euclidean over the position block, weighted absolute differences
  // (shortest arc on angles) over the remaining dims
  double sq = 0.0;
  for (int i = 0; i < position_dim; ++i) {
    const double delta = a[i] - b[i];
    sq += delta * delta;
  }
  double d = metric_weights[0] * std::sqrt(sq);
  for (int i = position_dim; i < state_dim; ++i) {
    const double delta = angle_wrap[i] ? std::abs(wrap_angle(a[i] - b[i]))
                                       : std::abs(a[i] - b[i]);
    d += metric_weights[i] * delta;
  }
  return d;
}

bool DynamicsModel::state_in_bounds(const State& x) const {
  for (int i = 0; i < state_dim; ++i) {
    if (angle_wrap[i]) continue;
    if (x[i] < state_lower[i] || x[i] > state_upper[i]) return false;
  }
  return true;
}

bool DynamicsModel::control_in_bounds(const Control& u) const {
  for (int i = 0; i < control_dim; ++i) {
    if (u[i] < control_lower[i] || u[i] > control_upper[i]) return false;
  }
  return true;
}

State DynamicsModel::wrapped(State x) const {
  for (int i = 0; i < state_dim; ++i) {
    if (angle_wrap[i]) x[i] = wrap_angle(x[i]);
  }
  return x;
}

Eigen::VectorXd DynamicsModel::reduce(const State& x) const {
  return x.tail(state_dim - position_dim);
}

Eigen::VectorXd DynamicsModel::reduced_weights() const {
  return metric_weights.tail(state_dim - position_dim);
}

std::vector<bool> DynamicsModel::reduced_angle_wrap() const {
  return {angle_wrap.begin() + position_dim, angle_wrap.end()};
}

double DynamicsModel::max_speed() const {
  switch (id) {
    case ModelId::Unicycle1st:
    case ModelId::CarWithTrailer:
      return std::max(std::abs(control_lower[0]), std::abs(control_upper[0]));
    case ModelId::DoubleIntegrator2d:
    case ModelId::DoubleIntegrator3d: {
      // speed bound is the norm of the per-axis velocity bounds
      double sq = 0.0;
      for (int i = position_dim; i < 2 * position_dim; ++i) {
        double v = std::max(std::abs(state_lower[i]), std::abs(state_upper[i]));
        sq += v * v;
      }
      return std::sqrt(sq);
    }
  }
  throw std::logic_error("unknown model id");
}

void DynamicsModel::check_state(const State& x) const {
  if (static_cast<int>(x.size()) != state_dim)
    throw std::invalid_argument("state dimension mismatch for " + to_string(id));
}

void DynamicsModel::check_control(const Control& u) const {
  if (static_cast<int>(u.size()) != control_dim)
    throw std::invalid_argument("control dimension mismatch for " +
                                to_string(id));
}

DynamicsModel make_model(ModelId id, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  DynamicsModel m;
  m.id = id;
  m.dt = dt;
  switch (id) {
    case ModelId::Unicycle1st: {
      m.state_dim = 3;
      m.control_dim = 2;
      m.position_dim = 2;
      m.heading_dim = 2;
      m.angle_wrap = {false, false, true};
      m.state_lower = Eigen::Vector3d(-kUnbounded, -kUnbounded, -kPi);
      m.state_upper = Eigen::Vector3d(kUnbounded, kUnbounded, kPi);
      m.control_lower = Eigen::Vector2d(-0.5, -0.5);
      m.control_upper = Eigen::Vector2d(0.5, 0.5);
      m.metric_weights = Eigen::Vector3d(1.0, 1.0, 0.5);
      break;
    }
    case ModelId::DoubleIntegrator2d: {
      m.state_dim = 4;
      m.control_dim = 2;
      m.position_dim = 2;
      m.angle_wrap = {false, false, false, false};
      m.state_lower = Eigen::Vector4d(-kUnbounded, -kUnbounded, -0.5, -0.5);
      m.state_upper = Eigen::Vector4d(kUnbounded, kUnbounded, 0.5, 0.5);
      m.control_lower = Eigen::Vector2d(-0.5, -0.5);
      m.control_upper = Eigen::Vector2d(0.5, 0.5);
      m.metric_weights = Eigen::Vector4d(1.0, 1.0, 0.25, 0.25);
      break;
    }
    case ModelId::DoubleIntegrator3d: {
      m.state_dim = 6;
      m.control_dim = 3;
      m.position_dim = 3;
      m.angle_wrap = std::vector<bool>(6, false);
      m.state_lower.resize(6);
      m.state_upper.resize(6);
      m.state_lower << -kUnbounded, -kUnbounded, -kUnbounded, -0.5, -0.5, -0.5;
      m.state_upper << kUnbounded, kUnbounded, kUnbounded, 0.5, 0.5, 0.5;
      m.control_lower = Eigen::Vector3d(-0.5, -0.5, -0.5);
      m.control_upper = Eigen::Vector3d(0.5, 0.5, 0.5);
      m.metric_weights.resize(6);
      m.metric_weights << 1.0, 1.0, 1.0, 0.25, 0.25, 0.25;
      break;
    }
    case ModelId::CarWithTrailer: {
      m.state_dim = 4;
      m.control_dim = 2;
      m.position_dim = 2;
      m.heading_dim = 2;
      m.trailer_dim = 3;
      m.angle_wrap = {false, false, true, true};
      m.state_lower = Eigen::Vector4d(-kUnbounded, -kUnbounded, -kPi, -kPi);
      m.state_upper = Eigen::Vector4d(kUnbounded, kUnbounded, kPi, kPi);
      m.control_lower = Eigen::Vector2d(-0.1, -kPi / 3.0);
      m.control_upper = Eigen::Vector2d(0.5, kPi / 3.0);
      m.metric_weights = Eigen::Vector4d(1.0, 1.0, 0.5, 0.5);
      m.wheelbase = 0.25;
      m.hitch_length = 0.5;
      break;
    }
  }
  return m;
}

}  // namespace dblacam
