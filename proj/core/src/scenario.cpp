#include "dblacam/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dblacam {

namespace {
using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json vec3_to_json(const Eigen::Vector3d& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

Eigen::Vector3d vec3_from_json(const json& j) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < j.size() && i < 3; ++i) v[i] = j.at(i).get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, int cols_hint) {
  const auto rows = j.size();
  if (rows == 0) return Eigen::MatrixXd(0, cols_hint);
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

void apply_model_overrides(DynamicsModel& m, const json& j) {
  if (j.contains("dt")) {
    m = make_model(m.id, j.at("dt").get<double>());
  }
  if (j.contains("state_lower")) m.state_lower = vec_from_json(j.at("state_lower"));
  if (j.contains("state_upper")) m.state_upper = vec_from_json(j.at("state_upper"));
  if (j.contains("control_lower"))
    m.control_lower = vec_from_json(j.at("control_lower"));
  if (j.contains("control_upper"))
    m.control_upper = vec_from_json(j.at("control_upper"));
  if (j.contains("metric_weights"))
    m.metric_weights = vec_from_json(j.at("metric_weights"));
  if (j.contains("wheelbase")) m.wheelbase = j.at("wheelbase").get<double>();
  if (j.contains("hitch_length"))
    m.hitch_length = j.at("hitch_length").get<double>();
}

json shape_to_json(const CollisionShape& s, int dim) {
  json j;
  if (s.kind == CollisionShape::Kind::Sphere) {
    j["kind"] = "sphere";
    j["radius"] = s.radius;
  } else {
    j["kind"] = "box";
    j["half_extents"] = vec3_to_json(s.half_extents, dim);
  }
  return j;
}

CollisionShape shape_from_json(const json& j) {
  CollisionShape s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") {
    s.kind = CollisionShape::Kind::Sphere;
    s.radius = j.at("radius").get<double>();
  } else if (kind == "box") {
    s.kind = CollisionShape::Kind::Box;
    s.half_extents = vec3_from_json(j.at("half_extents"));
  } else {
    throw std::invalid_argument("unknown shape kind: " + kind);
  }
  return s;
}

}  // namespace

std::vector<State> Scenario::starts() const {
  std::vector<State> out;
  out.reserve(robots.size());
  for (const auto& r : robots) out.push_back(r.start);
  return out;
}

std::vector<State> Scenario::goals() const {
  std::vector<State> out;
  out.reserve(robots.size());
  for (const auto& r : robots) out.push_back(r.goal);
  return out;
}

bool states_collide(const DynamicsModel& ma, const CollisionShape& sa,
                    const State& xa, const DynamicsModel& mb,
                    const CollisionShape& sb, const State& xb, int dim,
                    double margin) {
  for (int i = 0; i < body_count(ma); ++i) {
    const Pose pa = body_pose(ma, xa, i);
    for (int j = 0; j < body_count(mb); ++j) {
      if (shapes_intersect(sa, pa, sb, body_pose(mb, xb, j), dim, margin))
        return true;
    }
  }
  return false;
}

void check_scenario(const Scenario& s) {
  const Workspace& ws = s.workspace;
  if (ws.dim != 2 && ws.dim != 3)
    throw std::invalid_argument("workspace dim must be 2 or 3");
  for (int i = 0; i < ws.dim; ++i) {
    if (!(ws.lower[i] < ws.upper[i]))
      throw std::invalid_argument("workspace lower must be below upper");
  }
  for (const auto& o : ws.obstacles) {
    if (o.kind == Obstacle::Kind::Sphere && o.radius <= 0.0)
      throw std::invalid_argument("obstacle radius must be positive");
    if (o.kind == Obstacle::Kind::Box &&
        (o.half_extents.head(ws.dim).minCoeff() <= 0.0))
      throw std::invalid_argument("obstacle extents must be positive");
  }
  for (size_t i = 0; i < s.robots.size(); ++i) {
    const RobotSpec& r = s.robots[i];
    r.model.check_state(r.start);
    r.model.check_state(r.goal);
    if (!state_free(ws, r.shape, r.model, r.start))
      throw std::invalid_argument("robot " + std::to_string(i) +
                                  ": start state in collision");
    if (!position_inside(ws, [&] {
          Eigen::Vector3d p = Eigen::Vector3d::Zero();
          p.head(r.model.position_dim) = r.goal.head(r.model.position_dim);
          return p;
        }()))
      throw std::invalid_argument("robot " + std::to_string(i) +
                                  ": goal outside workspace");
    if (!r.model.state_in_bounds(r.goal))
      throw std::invalid_argument("robot " + std::to_string(i) +
                                  ": goal outside state bounds");
    if (r.model.id == ModelId::DoubleIntegrator2d ||
        r.model.id == ModelId::DoubleIntegrator3d) {
      const int p = r.model.position_dim;
      if (r.goal.segment(p, p).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument(
            "robot " + std::to_string(i) +
            ": double-integrator goal must have zero velocity");
    }
    if (r.model.max_speed() * r.model.dt >=
        r.shape.bounding_radius(ws.dim))
      throw std::invalid_argument("robot " + std::to_string(i) +
                                  ": v_max*dt must stay below the shape size");
    for (size_t j = 0; j < i; ++j) {
      const RobotSpec& q = s.robots[j];
      if (states_collide(r.model, r.shape, r.start, q.model, q.shape, q.start,
                         ws.dim))
        throw std::invalid_argument("robots " + std::to_string(j) + "," +
                                    std::to_string(i) + ": starts collide");
    }
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "dblacam-scenario" || j.value("version", 0) != 1)
    throw std::runtime_error(path + ": bad scenario format/version");

  Scenario s;
  s.name = j.value("name", "scenario");
  s.delta = j.value("delta", 0.5);
  s.alpha = j.value("alpha", 1.0);
  s.delta_g = j.value("delta_g", 0.3);

  const json& wj = j.at("workspace");
  s.workspace.dim = wj.at("dim").get<int>();
  s.workspace.lower = vec3_from_json(wj.at("lower"));
  s.workspace.upper = vec3_from_json(wj.at("upper"));
  for (const auto& oj : wj.value("obstacles", json::array())) {
    Obstacle o;
    const std::string kind = oj.at("kind").get<std::string>();
    o.center = vec3_from_json(oj.at("center"));
    if (kind == "sphere") {
      o.kind = Obstacle::Kind::Sphere;
      o.radius = oj.at("radius").get<double>();
    } else if (kind == "box") {
      o.kind = Obstacle::Kind::Box;
      o.half_extents = vec3_from_json(oj.at("half_extents"));
      o.yaw = oj.value("yaw", 0.0);
    } else {
      throw std::runtime_error("unknown obstacle kind: " + kind);
    }
    s.workspace.obstacles.push_back(o);
  }

  for (const auto& rj : j.at("robots")) {
    RobotSpec r;
    r.model =
        make_model(model_id_from_string(rj.at("model").get<std::string>()));
    if (rj.contains("model_params"))
      apply_model_overrides(r.model, rj.at("model_params"));
    r.shape = shape_from_json(rj.at("shape"));
    r.start = r.model.wrapped(vec_from_json(rj.at("start")));
    r.goal = r.model.wrapped(vec_from_json(rj.at("goal")));
    s.robots.push_back(std::move(r));
  }
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  json j;
  j["format"] = "dblacam-scenario";
  j["version"] = 1;
  j["name"] = s.name;
  j["delta"] = s.delta;
  j["alpha"] = s.alpha;
  j["delta_g"] = s.delta_g;

  json wj;
  wj["dim"] = s.workspace.dim;
  wj["lower"] = vec3_to_json(s.workspace.lower, s.workspace.dim);
  wj["upper"] = vec3_to_json(s.workspace.upper, s.workspace.dim);
  json obs = json::array();
  for (const auto& o : s.workspace.obstacles) {
    json oj;
    oj["center"] = vec3_to_json(o.center, s.workspace.dim);
    if (o.kind == Obstacle::Kind::Sphere) {
      oj["kind"] = "sphere";
      oj["radius"] = o.radius;
    } else {
      oj["kind"] = "box";
      oj["half_extents"] = vec3_to_json(o.half_extents, s.workspace.dim);
      if (o.yaw != 0.0) oj["yaw"] = o.yaw;
    }
    obs.push_back(std::move(oj));
  }
  wj["obstacles"] = std::move(obs);
  j["workspace"] = std::move(wj);

  json robots = json::array();
  for (const auto& r : s.robots) {
    json rj;
    rj["model"] = to_string(r.model.id);
    rj["shape"] = shape_to_json(r.shape, s.workspace.dim);
    rj["start"] = vec_to_json(r.start);
    rj["goal"] = vec_to_json(r.goal);
    json mp;
    mp["dt"] = r.model.dt;
    mp["control_lower"] = vec_to_json(r.model.control_lower);
    mp["control_upper"] = vec_to_json(r.model.control_upper);
    mp["state_lower"] = vec_to_json(r.model.state_lower);
    mp["state_upper"] = vec_to_json(r.model.state_upper);
    mp["metric_weights"] = vec_to_json(r.model.metric_weights);
    if (r.model.id == ModelId::CarWithTrailer) {
      mp["wheelbase"] = r.model.wheelbase;
      mp["hitch_length"] = r.model.hitch_length;
    }
    rj["model_params"] = std::move(mp);
    robots.push_back(std::move(rj));
  }
  j["robots"] = std::move(robots);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

Solution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "dblacam-solution" || j.value("version", 0) != 1)
    throw std::runtime_error(path + ": bad solution format/version");
  Solution s;
  s.planner = j.value("planner", "");
  s.scenario_name = j.value("scenario", "");
  s.seed = j.value("seed", uint64_t{0});
  s.expansions = j.value("expansions", 0LL);
  s.cost_s = j.value("cost_s", 0.0);
  if (j.contains("config")) {
    for (auto it = j.at("config").begin(); it != j.at("config").end(); ++it)
      s.config[it.key()] = it.value().get<std::string>();
  }
  for (const auto& rj : j.at("robots")) {
    RobotTrajectory t;
    t.states = matrix_from_json(rj.at("states"), 0);
    t.controls = matrix_from_json(rj.at("controls"), 0);
    t.cost_s = rj.at("cost_s").get<double>();
    s.robots.push_back(std::move(t));
  }
  return s;
}

void save_solution(const Solution& s, const std::string& path) {
  json j;
  j["format"] = "dblacam-solution";
  j["version"] = 1;
  j["planner"] = s.planner;
  j["scenario"] = s.scenario_name;
  j["seed"] = s.seed;
  j["expansions"] = s.expansions;
  j["cost_s"] = s.cost_s;
  json cfg;
  for (const auto& [k, v] : s.config) cfg[k] = v;
  j["config"] = std::move(cfg);
  json robots = json::array();
  for (const auto& t : s.robots) {
    json rj;
    rj["states"] = matrix_to_json(t.states);
    rj["controls"] = matrix_to_json(t.controls);
    rj["steps"] = static_cast<int>(t.controls.rows());
    rj["cost_s"] = t.cost_s;
    robots.push_back(std::move(rj));
  }
  j["robots"] = std::move(robots);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << "\n";
}

}  // namespace dblacam
