#include "dblacam/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace dblacam {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDuplicateRadius = 0.01;

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

// Fixed-point start states for the stay primitive, covering the reduced
// space densely enough that some stay is applicable anywhere (given the
// default alpha*delta = 0.5).
std::vector<Eigen::VectorXd> stay_anchors(const DynamicsModel& model) {
  std::vector<Eigen::VectorXd> anchors;
  switch (model.id) {
    case ModelId::Unicycle1st: {
      for (int k = 0; k < 8; ++k) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
        x[2] = wrap_angle(-kPi + k * kPi / 4.0);
        anchors.push_back(x);
      }
      break;
    }
    case ModelId::DoubleIntegrator2d:
      anchors.push_back(Eigen::VectorXd::Zero(4));
      break;
    case ModelId::DoubleIntegrator3d:
      anchors.push_back(Eigen::VectorXd::Zero(6));
      break;
    case ModelId::CarWithTrailer: {
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
          x[2] = wrap_angle(-kPi + i * kPi / 4.0);
          x[3] = wrap_angle(-kPi + j * kPi / 4.0);
          anchors.push_back(x);
        }
      }
      break;
    }
  }
  return anchors;
}

}  // namespace

PrimitiveSet::PrimitiveSet(DynamicsModel model, int horizon,
                           std::vector<MotionPrimitive> primitives)
    : model_(std::move(model)),
      horizon_(horizon),
      primitives_(std::move(primitives)) {
  for (const auto& p : primitives_) {
    if (p.controls.rows() != horizon_ || p.states.rows() != horizon_ + 1)
      throw std::invalid_argument("primitive horizon mismatch");
  }
  reindex();
}

void PrimitiveSet::reindex() {
  start_index_ =
      KdTree(model_.reduced_weights(), model_.reduced_angle_wrap());
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(primitives_.size());
  for (const auto& p : primitives_)
    starts.push_back(model_.reduce(p.states.row(0).transpose()));
  start_index_.build(starts);
}

std::vector<int> PrimitiveSet::applicable(const State& x, double radius) const {
  std::vector<int> out;
  applicable(x, radius, out);
  return out;
}

void PrimitiveSet::applicable(const State& x, double radius,
                              std::vector<int>& out) const {
  model_.check_state(x);
  start_index_.radius_search(model_.reduce(model_.wrapped(x)), radius, out);
  std::sort(out.begin(), out.end());
}

void PrimitiveSet::append(std::vector<MotionPrimitive> extra) {
  for (auto& p : extra) {
    if (p.controls.rows() != horizon_)
      throw std::invalid_argument("primitive horizon mismatch");
    p.id = static_cast<int>(primitives_.size());
    primitives_.push_back(std::move(p));
  }
  reindex();
}

PrimitiveSet generate_primitives(const DynamicsModel& model, int count,
                                 int horizon, uint64_t seed) {
  if (count <= 0 || horizon <= 0)
    throw std::invalid_argument("generate_primitives: count and horizon must be positive");

  std::mt19937_64 rng(seed);
  std::vector<MotionPrimitive> prims;
  prims.reserve(count);
  KdTree final_index(model.metric_weights, model.angle_wrap, model.position_dim);

  auto try_accept = [&](Eigen::MatrixXd controls, const State& x0) -> bool {
    RolloutResult r = model.rollout(x0, controls);
    if (!r.in_bounds) return false;
    const State xf = r.states.row(horizon).transpose();
    if (auto hit = final_index.nearest(xf);
        hit && hit->dist < kDuplicateRadius)
      return false;
    MotionPrimitive p;
    p.id = static_cast<int>(prims.size());
    p.states = std::move(r.states);
    p.controls = std::move(controls);
    final_index.insert(xf, p.id);
    prims.push_back(std::move(p));
    return true;
  };

  for (const auto& anchor : stay_anchors(model)) {
    if (static_cast<int>(prims.size()) >= count) break;
    try_accept(Eigen::MatrixXd::Zero(horizon, model.control_dim), anchor);
  }

  std::uniform_int_distribution<int> seg_count_dist(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long long attempts = 0;
  const long long max_attempts = 100LL * count;
  while (static_cast<int>(prims.size()) < count) {
    if (++attempts > max_attempts)
      throw GenerationExhausted("primitive generation exhausted after " +
                                std::to_string(max_attempts) + " attempts");
    // start state: canonical position, random reduced dims within bounds
    State x0 = Eigen::VectorXd::Zero(model.state_dim);
    for (int i = model.position_dim; i < model.state_dim; ++i) {
      if (model.angle_wrap[i]) {
        x0[i] = wrap_angle(-kPi + 2.0 * kPi * unit(rng));
      } else {
        std::uniform_real_distribution<double> d(model.state_lower[i],
                                                 model.state_upper[i]);
        x0[i] = d(rng);
      }
    }
    // piecewise-constant controls over 2-4 segments
    const int n_seg = std::min(seg_count_dist(rng), horizon);
    std::vector<int> cuts{0, horizon};
    std::uniform_int_distribution<int> cut_dist(1, horizon - 1);
    while (static_cast<int>(cuts.size()) < n_seg + 1) {
      const int c = cut_dist(rng);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
        cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    Eigen::MatrixXd controls(horizon, model.control_dim);
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
      Eigen::VectorXd u(model.control_dim);
      for (int i = 0; i < model.control_dim; ++i) {
        std::uniform_real_distribution<double> d(model.control_lower[i],
                                                 model.control_upper[i]);
        u[i] = d(rng);
      }
      for (int k = cuts[s]; k < cuts[s + 1]; ++k) controls.row(k) = u;
    }
    try_accept(std::move(controls), x0);
  }

  return PrimitiveSet(model, horizon, std::move(prims));
}

void save_set(const PrimitiveSet& set, const std::string& path) {
  const DynamicsModel& m = set.model();
  json j;
  j["format"] = "dblacam-primitives";
  j["version"] = 1;
  j["model"] = to_string(m.id);
  j["dt"] = m.dt;
  j["horizon"] = set.horizon();
  j["count"] = set.size();
  j["state_lower"] = vector_to_json(m.state_lower);
  j["state_upper"] = vector_to_json(m.state_upper);
  j["control_lower"] = vector_to_json(m.control_lower);
  j["control_upper"] = vector_to_json(m.control_upper);
  j["metric_weights"] = vector_to_json(m.metric_weights);
  j["wheelbase"] = m.wheelbase;
  j["hitch_length"] = m.hitch_length;
  json prims = json::array();
  for (const auto& p : set.primitives()) {
    json pj;
    pj["id"] = p.id;
    pj["states"] = matrix_to_json(p.states);
    pj["controls"] = matrix_to_json(p.controls);
    prims.push_back(std::move(pj));
  }
  j["primitives"] = std::move(prims);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << "\n";
}

PrimitiveSet load_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorruptPrimitiveFile("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptPrimitiveFile(path + ": " + e.what());
  }
  if (j.value("format", "") != "dblacam-primitives" || j.value("version", 0) != 1)
    throw CorruptPrimitiveFile(path + ": bad format/version tag");

  DynamicsModel model =
      make_model(model_id_from_string(j.at("model").get<std::string>()),
                 j.at("dt").get<double>());
  model.state_lower = vector_from_json(j.at("state_lower"));
  model.state_upper = vector_from_json(j.at("state_upper"));
  model.control_lower = vector_from_json(j.at("control_lower"));
  model.control_upper = vector_from_json(j.at("control_upper"));
  model.metric_weights = vector_from_json(j.at("metric_weights"));
  model.wheelbase = j.at("wheelbase").get<double>();
  model.hitch_length = j.at("hitch_length").get<double>();

  const int horizon = j.at("horizon").get<int>();
  std::vector<MotionPrimitive> prims;
  for (const auto& pj : j.at("primitives")) {
    MotionPrimitive p;
    p.id = pj.at("id").get<int>();
    p.states = matrix_from_json(pj.at("states"));
    p.controls = matrix_from_json(pj.at("controls"));
    if (p.states.rows() != horizon + 1 || p.controls.rows() != horizon)
      throw CorruptPrimitiveFile(path + ": primitive horizon mismatch");
    for (int d = 0; d < model.position_dim; ++d) {
      if (p.states(0, d) != 0.0)
        throw CorruptPrimitiveFile(path + ": non-canonical start state");
    }
    for (int k = 0; k < horizon; ++k) {
      if (!model.control_in_bounds(p.controls.row(k).transpose()))
        throw CorruptPrimitiveFile(path + ": control out of bounds");
      const State expect =
          model.step(p.states.row(k).transpose(), p.controls.row(k).transpose());
      for (int d = 0; d < model.state_dim; ++d) {
        if (expect[d] != p.states(k + 1, d))
          throw CorruptPrimitiveFile(path + ": dynamics residual at step " +
                                     std::to_string(k));
      }
    }
    prims.push_back(std::move(p));
  }
  if (static_cast<int>(prims.size()) != j.at("count").get<int>())
    throw CorruptPrimitiveFile(path + ": count mismatch");
  return PrimitiveSet(std::move(model), horizon, std::move(prims));
}

std::vector<RolledMotion> rollout_applicable(
    const DynamicsModel& model, const Workspace& ws,
    const CollisionShape& shape, const State& x, const PrimitiveSet& set,
    const std::vector<int>& candidate_ids, int robot_id) {
  std::vector<RolledMotion> out;
  out.reserve(candidate_ids.size());
  for (int id : candidate_ids) {
    const MotionPrimitive& p = set.at(id);
    RolloutResult r = model.rollout(x, p.controls);
    if (!r.in_bounds) continue;
    RolledMotion m;
    m.primitive_id = id;
    m.robot = robot_id;
    m.states = std::move(r.states);
    m.controls = p.controls;
    m.model = &model;
    m.shape = shape;
    finalize_motion_bounds(m);
    if (!motion_free(ws, m)) continue;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace dblacam
