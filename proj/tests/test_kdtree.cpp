#include <doctest.h>

#include <random>

#include "dblacam/kdtree.hpp"

using namespace dblacam;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Fixture {
  Eigen::VectorXd weights;
  std::vector<bool> circular;
  int euclid_prefix;
  std::vector<Eigen::VectorXd> points;

  double metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    double sq = 0.0;
    for (int i = 0; i < euclid_prefix; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    double d = euclid_prefix > 0 ? weights[0] * std::sqrt(sq) : 0.0;
    for (int i = euclid_prefix; i < weights.size(); ++i) {
      double delta = std::abs(a[i] - b[i]);
      if (circular[i]) delta = std::min(delta, 2 * kPi - delta);
      d += weights[i] * delta;
    }
    return d;
  }
};

Fixture unicycle_like(int count, uint64_t seed) {
  Fixture f;
  f.weights = Eigen::Vector3d(1.0, 1.0, 0.5);
  f.circular = {false, false, true};
  f.euclid_prefix = 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd p(3);
    p << pos(rng), pos(rng), ang(rng);
    if (p[2] >= kPi) p[2] = -kPi;
    f.points.push_back(p);
  }
  return f;
}
}  // namespace

TEST_SUITE_BEGIN("kdtree");

TEST_CASE("nearest matches linear scan, bulk build and inserts") {
  auto f = unicycle_like(500, 1);
  KdTree bulk(f.weights, f.circular, f.euclid_prefix);
  bulk.build(f.points);
  KdTree incr(f.weights, f.circular, f.euclid_prefix);
  for (int i = 0; i < (int)f.points.size(); ++i) incr.insert(f.points[i], i);

  auto q = unicycle_like(200, 2);
  for (const auto& query : q.points) {
    int best = -1;
    double best_d = 1e18;
    for (int i = 0; i < (int)f.points.size(); ++i) {
      const double d = f.metric(query, f.points[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const auto hb = bulk.nearest(query);
    const auto hi = incr.nearest(query);
    REQUIRE(hb.has_value());
    REQUIRE(hi.has_value());
    CHECK(hb->dist == doctest::Approx(best_d).epsilon(1e-12));
    CHECK(hi->dist == doctest::Approx(best_d).epsilon(1e-12));
    CHECK(f.metric(query, f.points[hb->payload]) ==
          doctest::Approx(best_d).epsilon(1e-12));
    (void)best;
  }
}

TEST_CASE("radius search is exact vs linear scan") {
  auto f = unicycle_like(400, 3);
  KdTree tree(f.weights, f.circular, f.euclid_prefix);
  tree.build(f.points);
  auto queries = unicycle_like(100, 4);
  std::vector<int> got;
  for (const auto& query : queries.points) {
    for (double r : {0.2, 1.0, 3.0}) {
      std::vector<int> want;
      for (int i = 0; i < (int)f.points.size(); ++i)
        if (f.metric(query, f.points[i]) <= r) want.push_back(i);
      tree.radius_search(query, r, got);
      std::sort(got.begin(), got.end());
      REQUIRE(got == want);
      REQUIRE(tree.count_within(query, r) == (int)want.size());
    }
  }
}

TEST_CASE("wrap-around neighbors found across the seam") {
  Eigen::VectorXd w(1);
  w << 1.0;
  KdTree tree(w, {true});
  Eigen::VectorXd a(1), b(1), q(1);
  a << kPi - 0.05;
  b << 0.0;
  tree.insert(a, 0);
  tree.insert(b, 1);
  q << -kPi + 0.05;
  const auto hit = tree.nearest(q);
  REQUIRE(hit.has_value());
  CHECK(hit->payload == 0);
  CHECK(hit->dist == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("empty tree") {
  KdTree tree(Eigen::Vector2d(1, 1), {false, false});
  CHECK_FALSE(tree.nearest(Eigen::Vector2d(0, 0)).has_value());
  CHECK(tree.count_within(Eigen::Vector2d(0, 0), 10.0) == 0);
}

TEST_SUITE_END();
