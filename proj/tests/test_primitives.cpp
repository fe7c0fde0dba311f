#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dblacam/primitives.hpp"
#include "helpers.hpp"

#include <json.hpp>

using namespace dblacam;
using namespace dblacam::test;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_SUITE_BEGIN("primitives");

TEST_CASE("generation: stay primitive for double integrator") {
  const auto m = make_model(ModelId::DoubleIntegrator2d);
  const auto set = generate_primitives(m, 1, 10, 5);
  REQUIRE(set.size() == 1);
  const auto& p = set.at(0);
  CHECK(p.controls.cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k <= 10; ++k)
    CHECK((p.states.row(k).array() == p.states.row(0).array()).all());
}

TEST_CASE("generation: determinism") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto a = generate_primitives(m, 50, 20, 123);
  const auto b = generate_primitives(m, 50, 20, 123);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK((a.at(i).states.array() == b.at(i).states.array()).all());
    CHECK((a.at(i).controls.array() == b.at(i).controls.array()).all());
  }
  const auto c = generate_primitives(m, 50, 20, 124);
  bool any_diff = false;
  for (int i = 0; i < a.size() && !any_diff; ++i)
    any_diff = (a.at(i).states.array() != c.at(i).states.array()).any();
  CHECK(any_diff);
}

TEST_CASE("generation: 300 unicycle primitives, distinct finals, canonical") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 300, 20, 1);
  REQUIRE(set.size() == 300);
  for (int i = 0; i < set.size(); ++i) {
    CHECK(set.at(i).states(0, 0) == 0.0);
    CHECK(set.at(i).states(0, 1) == 0.0);
    // dynamics residual is exactly zero
    for (int k = 0; k < 20; ++k) {
      const State expect = m.step(set.at(i).states.row(k).transpose(),
                                  set.at(i).controls.row(k).transpose());
      for (int d = 0; d < 3; ++d) REQUIRE(expect[d] == set.at(i).states(k + 1, d));
    }
  }
  for (int i = 0; i < set.size(); ++i) {
    for (int j = i + 1; j < set.size(); ++j) {
      REQUIRE(m.distance(set.at(i).states.row(20).transpose(),
                         set.at(j).states.row(20).transpose()) >= 0.01);
    }
  }
}

TEST_CASE("generation: rejects bad arguments and impossible requests") {
  const auto m = make_model(ModelId::Unicycle1st);
  CHECK_THROWS_AS(generate_primitives(m, 0, 20, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_primitives(m, 10, 0, 1), std::invalid_argument);
  // pinning controls and start velocity to zero leaves a single distinct
  // primitive, so any larger request must exhaust
  auto frozen = make_model(ModelId::DoubleIntegrator2d);
  frozen.control_lower.setZero();
  frozen.control_upper.setZero();
  frozen.state_lower[2] = frozen.state_upper[2] = 0.0;
  frozen.state_lower[3] = frozen.state_upper[3] = 0.0;
  CHECK_THROWS_AS(generate_primitives(frozen, 3, 5, 1), GenerationExhausted);
}

TEST_CASE("applicable: radius semantics and linear-scan agreement") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 300, 20, 7);

  const State x = Eigen::Vector3d(3.3, -1.0, 0.7);
  // alpha*delta = infinity returns everything
  CHECK((int)set.applicable(x, 1e18).size() == set.size());

  // exact-match-only radius: no primitive start matches a generic theta
  CHECK(set.applicable(Eigen::Vector3d(0, 0, 0.123456), 0.0).empty());

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-5, 5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int q = 0; q < 1000; ++q) {
    const State query = Eigen::Vector3d(pos(rng), pos(rng), ang(rng));
    const double radius = 0.05 + 0.3 * (q % 7);
    std::vector<int> want;
    for (int i = 0; i < set.size(); ++i) {
      const double d = 0.5 * std::min(std::abs(query[2] - set.at(i).states(0, 2)),
                                      2 * kPi -
                                          std::abs(query[2] - set.at(i).states(0, 2)));
      if (d <= radius) want.push_back(i);
    }
    REQUIRE(set.applicable(query, radius) == want);
  }
}

TEST_CASE("applicable: spec theta window example") {
  // starts at theta in {0, 0.3, 1.0}, w_theta = 0.5, radius 0.2 -> {0, 0.3}
  const auto m = make_model(ModelId::Unicycle1st);
  std::vector<MotionPrimitive> prims;
  int id = 0;
  for (double theta : {0.0, 0.3, 1.0}) {
    MotionPrimitive p;
    p.id = id++;
    Eigen::MatrixXd controls = Eigen::MatrixXd::Zero(5, 2);
    State x0 = Eigen::Vector3d(0, 0, theta);
    p.states = m.rollout(x0, controls).states;
    p.controls = controls;
    prims.push_back(std::move(p));
  }
  PrimitiveSet set(m, 5, std::move(prims));
  const auto got = set.applicable(Eigen::Vector3d(4.0, 4.0, 0.0), 0.2);
  CHECK(got == std::vector<int>{0, 1});
}

TEST_CASE("applicable: translation invariance") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 200, 20, 11);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> shift(-20, 20);
  for (int q = 0; q < 100; ++q) {
    const State x = Eigen::Vector3d(1.0, 2.0, wrap_angle(q * 0.13));
    State moved = x;
    moved[0] += shift(rng);
    moved[1] += shift(rng);
    REQUIRE(set.applicable(x, 0.5) == set.applicable(moved, 0.5));
  }
}

TEST_CASE("rollout_applicable: filters by environment and keeps exact dynamics") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 300, 20, 3);
  auto ws = empty_workspace(40.0);
  const State x = Eigen::Vector3d(20, 20, 0);
  const auto ids = set.applicable(x, 0.5);
  REQUIRE(!ids.empty());

  SUBCASE("no obstacles: all candidates survive") {
    const auto rolled = rollout_applicable(m, ws, sphere(0.2), x, set, ids, 0);
    CHECK(rolled.size() == ids.size());
    for (const auto& mo : rolled) {
      REQUIRE(mo.states.rows() == 21);
      // executed trajectory is dynamics-exact from x (zero discontinuity)
      CHECK((mo.states.row(0).transpose().array() == x.array()).all());
      for (int k = 0; k < 20; ++k) {
        const State expect = m.step(mo.states.row(k).transpose(),
                                    mo.controls.row(k).transpose());
        for (int d = 0; d < 3; ++d) REQUIRE(expect[d] == mo.states(k + 1, d));
      }
    }
  }

  SUBCASE("wall ahead: forward motions discarded, turning ones survive") {
    Obstacle wall;
    wall.kind = Obstacle::Kind::Box;
    wall.center = Eigen::Vector3d(20.7, 20, 0);
    wall.half_extents = Eigen::Vector3d(0.1, 3.0, 0);
    ws.obstacles.push_back(wall);
    const auto rolled = rollout_applicable(m, ws, sphere(0.2), x, set, ids, 0);
    CHECK(rolled.size() < ids.size());
    CHECK(!rolled.empty());
    for (const auto& mo : rolled) CHECK(motion_free(ws, mo));
  }

  SUBCASE("drives out of the workspace: discarded") {
    Workspace tight = empty_workspace(40.0);
    tight.upper.y() = 20.3;  // barely above the robot
    const auto rolled =
        rollout_applicable(m, tight, sphere(0.2), x, set, ids, 0);
    for (const auto& mo : rolled) {
      for (int k = 0; k <= 20; ++k) REQUIRE(mo.states(k, 1) <= 20.3 - 0.2);
    }
    CHECK(rolled.size() < ids.size());
  }
}

TEST_CASE("save/load round trip is bit-exact") {
  const auto m = make_model(ModelId::CarWithTrailer);
  const auto set = generate_primitives(m, 40, 15, 21);
  const auto path = temp_path("prims_roundtrip.json");
  save_set(set, path);
  const auto loaded = load_set(path);
  REQUIRE(loaded.size() == set.size());
  CHECK(loaded.model().id == m.id);
  CHECK(loaded.model().dt == m.dt);
  CHECK(loaded.horizon() == set.horizon());
  for (int i = 0; i < set.size(); ++i) {
    CHECK((loaded.at(i).states.array() == set.at(i).states.array()).all());
    CHECK((loaded.at(i).controls.array() == set.at(i).controls.array()).all());
  }
  std::remove(path.c_str());
}

TEST_CASE("load: tampered state fails the residual check") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 10, 10, 2);
  const auto path = temp_path("prims_tampered.json");
  save_set(set, path);
  {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    in.close();
    j["primitives"][3]["states"][5][0] =
        j["primitives"][3]["states"][5][0].get<double>() + 1e-3;
    std::ofstream out(path);
    out << j.dump();
  }
  CHECK_THROWS_AS(load_set(path), CorruptPrimitiveFile);
  std::remove(path.c_str());
}

TEST_CASE("load: version/model mismatch") {
  const auto m = make_model(ModelId::Unicycle1st);
  const auto set = generate_primitives(m, 5, 10, 2);
  const auto path = temp_path("prims_version.json");
  save_set(set, path);
  {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    in.close();
    j["version"] = 99;
    std::ofstream out(path);
    out << j.dump();
  }
  CHECK_THROWS_AS(load_set(path), CorruptPrimitiveFile);
  std::remove(path.c_str());
}

TEST_CASE("save/load: empty set") {
  const auto m = make_model(ModelId::Unicycle1st);
  PrimitiveSet set(m, 10, {});
  const auto path = temp_path("prims_empty.json");
  save_set(set, path);
  const auto loaded = load_set(path);
  CHECK(loaded.size() == 0);
  CHECK(loaded.horizon() == 10);
  CHECK(loaded.applicable(Eigen::Vector3d(0, 0, 0), 10.0).empty());
  std::remove(path.c_str());
}

TEST_SUITE_END();
