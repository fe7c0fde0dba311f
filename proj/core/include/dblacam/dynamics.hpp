#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dblacam {

using State = Eigen::VectorXd;
using Control = Eigen::VectorXd;

enum class ModelId {
  Unicycle1st,
  DoubleIntegrator2d,
  DoubleIntegrator3d,
  CarWithTrailer,
};

std::string to_string(ModelId id);
ModelId model_id_from_string(const std::string& name);

/// Map an angle to [-pi, pi).
double wrap_angle(double a);

struct RolloutResult {
  Eigen::MatrixXd states;  // (K+1) x state_dim
  bool in_bounds = true;   // every state within the model's state bounds
};

/// Robot dynamics under zero-order hold: x' = x + f(x,u)*dt, explicit Euler.
///
/// The struct is plain data plus pure member functions; instances are
/// immutable in practice and safe to share across threads. Angle dimensions
/// are kept wrapped to [-pi, pi) and have no box bounds.
class DynamicsModel {
 public:
  ModelId id = ModelId::Unicycle1st;
  double dt = 0.1;
  int state_dim = 0;
  int control_dim = 0;
  int position_dim = 0;   // leading workspace-position dims (2 or 3)
  int heading_dim = -1;   // index of the body heading angle, -1 if none
  int trailer_dim = -1;   // index of the trailer angle (car_with_trailer)

  std::vector<bool> angle_wrap;  // per state dim
  Eigen::VectorXd state_lower, state_upper;
  Eigen::VectorXd control_lower, control_upper;
  Eigen::VectorXd metric_weights;

  double wheelbase = 0.25;      // L, car_with_trailer
  double hitch_length = 0.5;    // L_h, car_with_trailer

  Eigen::VectorXd deriv(const State& x, const Control& u) const;
  State step(const State& x, const Control& u) const;
  RolloutResult rollout(const State& x0, const Eigen::MatrixXd& controls) const;

  /// Weighted sum of per-dimension distances; shortest arc on angle dims.
  double distance(const State& a, const State& b) const;

  bool state_in_bounds(const State& x) const;
  bool control_in_bounds(const Control& u) const;
  State wrapped(State x) const;

  /// Drops the position dims (translation-invariant part of the state).
  Eigen::VectorXd reduce(const State& x) const;
  Eigen::VectorXd reduced_weights() const;
  std::vector<bool> reduced_angle_wrap() const;

  /// Maximum achievable translational speed, used to convert workspace
  /// distances into time lower bounds.
  double max_speed() const;

  void check_state(const State& x) const;
  void check_control(const Control& u) const;
};

/// Factory with the default bounds and metric weights for the four shipped
/// models. Bounds are configurable per scenario and recorded in output
/// metadata.
DynamicsModel make_model(ModelId id, double dt = 0.1);

}  // namespace dblacam
