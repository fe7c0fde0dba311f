#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "dblacam/clustering.hpp"
#include "helpers.hpp"

using namespace dblacam;
using namespace dblacam::test;

namespace {

// motions that only carry h and a final state, which is all clustering sees
std::vector<RolledMotion> stub_motions(const DynamicsModel& model,
                                       const std::vector<double>& hs,
                                       const std::vector<Eigen::Vector2d>& finals) {
  std::vector<RolledMotion> out;
  for (size_t i = 0; i < hs.size(); ++i) {
    const Eigen::Vector2d f =
        i < finals.size() ? finals[i] : Eigen::Vector2d(double(i), 0.0);
    RolledMotion m = straight_motion(model, {0, 0}, {f.x(), f.y()}, 4,
                                     sphere(0.2), 0);
    m.h = hs[i];
    m.goal_distance = hs[i];
    m.primitive_id = static_cast<int>(i);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> cluster_hs(const std::vector<RolledMotion>& motions,
                               const Cluster& c) {
  std::vector<double> out;
  for (int i : c.members) out.push_back(motions[i].h);
  return out;
}

// brute-force oracles straight from the definitions
std::vector<std::vector<double>> goc_oracle(std::vector<double> hs, double rho) {
  std::vector<std::vector<double>> clusters;
  if (hs.empty()) return clusters;
  std::sort(hs.begin(), hs.end());
  const double width = rho * (hs.back() - hs.front());
  size_t i = 0;
  while (i < hs.size()) {
    std::vector<double> c;
    const double h_l = hs[i];
    while (i < hs.size() && hs[i] - h_l <= width) c.push_back(hs[i++]);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

}  // namespace

TEST_SUITE_BEGIN("clustering");

TEST_CASE("goc: banded sweep on the reference values") {
  const auto m = make_model(ModelId::Unicycle1st);
  auto motions = stub_motions(m, {1.0, 1.04, 1.5, 2.0}, {});
  const auto clusters = goc_cluster(motions, 0.05);
  REQUIRE(clusters.size() == 3);
  CHECK(cluster_hs(motions, clusters[0]) == std::vector<double>{1.0, 1.04});
  CHECK(cluster_hs(motions, clusters[1]) == std::vector<double>{1.5});
  CHECK(cluster_hs(motions, clusters[2]) == std::vector<double>{2.0});
}

TEST_CASE("goc: degenerate bands") {
  const auto m = make_model(ModelId::Unicycle1st);
  auto equal = stub_motions(m, {2.0, 2.0, 2.0}, {});
  CHECK(goc_cluster(equal, 0.05).size() == 1);
  auto spread = stub_motions(m, {1.0, 5.0, 9.0}, {});
  CHECK(goc_cluster(spread, 1.0).size() == 1);  // rho=1 swallows everything
  CHECK(goc_cluster({}, 0.05).empty());
}

TEST_CASE("scgoc: singleton and tau-ball membership") {
  const auto m = make_model(ModelId::Unicycle1st);
  auto one = stub_motions(m, {1.5}, {Eigen::Vector2d(1, 1)});
  const auto c1 = scgoc_cluster(one, m, 1.0);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].members == std::vector<int>{0});

  auto two = stub_motions(m, {1.0, 2.0},
                          {Eigen::Vector2d(1, 0), Eigen::Vector2d(1.5, 0)});
  CHECK(scgoc_cluster(two, m, 1.0).size() == 1);  // d = 0.5 <= tau
  CHECK(scgoc_cluster(two, m, 0.4).size() == 2);
}

TEST_CASE("scgoc: left/right fans split by final-state distance") {
  const auto m = make_model(ModelId::Unicycle1st);
  // forward fan near goal (low h), left and right fans: near-equal higher h
  // but final states more than tau apart
  std::vector<double> hs = {1.0, 1.1, 3.0, 3.05, 3.0, 3.05};
  std::vector<Eigen::Vector2d> finals = {
      {2.0, 0.0},  {2.2, 0.0},             // forward
      {0.3, 1.8},  {0.5, 1.9},             // left fan
      {0.3, -1.8}, {0.5, -1.9},            // right fan
  };
  auto motions = stub_motions(m, hs, finals);
  const auto clusters = scgoc_cluster(motions, m, 1.0);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0].members == std::vector<int>{0, 1});
  // left and right fans never share a cluster
  for (const auto& c : clusters) {
    const bool has_left = std::count(c.members.begin(), c.members.end(), 2) ||
                          std::count(c.members.begin(), c.members.end(), 3);
    const bool has_right = std::count(c.members.begin(), c.members.end(), 4) ||
                           std::count(c.members.begin(), c.members.end(), 5);
    CHECK_FALSE((has_left && has_right));
  }
}

TEST_CASE("selection: deterministic and vanilla") {
  const auto m = make_model(ModelId::Unicycle1st);
  auto motions = stub_motions(m, {1.0, 2.0, 3.0}, {});
  Cluster c;
  c.members = {0, 1, 2};
  std::mt19937_64 rng(1);
  ClusterConfig cfg;
  cfg.selection = SelectionRule::Deterministic;
  cfg.n = 2;
  CHECK(select_elements(motions, c, cfg, rng) == std::vector<int>{0, 1});
  cfg.n = 10;
  CHECK(select_elements(motions, c, cfg, rng) == std::vector<int>{0, 1, 2});
  cfg.selection = SelectionRule::Vanilla;
  cfg.n = 1;  // vanilla ignores n
  CHECK(select_elements(motions, c, cfg, rng) == std::vector<int>{0, 1, 2});
}

TEST_CASE("selection: weighted frequencies follow 1/(h+eps)") {
  const auto m = make_model(ModelId::Unicycle1st);
  auto motions = stub_motions(m, {1.0, 3.0}, {});
  Cluster c;
  c.members = {0, 1};
  ClusterConfig cfg;
  cfg.selection = SelectionRule::Weighted;
  cfg.n = 1;
  std::mt19937_64 rng(2024);
  int first = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto sel = select_elements(motions, c, cfg, rng);
    REQUIRE(sel.size() == 1);
    if (sel[0] == 0) ++first;
  }
  // p(first) = (1/1)/(1/1 + 1/3) = 0.75; chi-square with 1 dof at p=0.01
 
  const double e0 = 0.75 * trials, e1 = 0.25 * trials;
  const double chi2 = (first - e0) * (first - e0) / e0 +
                      (trials - first - e1) * (trials - first - e1) / e1;
  CHECK(chi2 < 6.635);
 
}

TEST_CASE("inside-out reorder follows the index pattern") {
  CHECK(inside_out_reorder({1, 2, 3, 4, 5}) == std::vector<int>{3, 2, 4, 1, 5});
  CHECK(inside_out_reorder({1}) == std::vector<int>{1});
  CHECK(inside_out_reorder({1, 2, 3, 4}) == std::vector<int>{2, 1, 3, 4});
  CHECK(inside_out_reorder({}) == std::vector<int>{});
  for (int n = 1; n <= 9; ++n) {
    std::vector<int> in(n);
    std::iota(in.begin(), in.end(), 0);
    auto out = inside_out_reorder(in);
    auto sorted = out;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == in);  // permutation
    CHECK(out[0] == (n + 1) / 2 - 1);
  }
}

TEST_CASE("cluster_motions: composition matches the component oracles") {
  const auto m = make_model(ModelId::Unicycle1st);
  std::mt19937_64 rng(5);

  SUBCASE("none sorts by h") {
    auto motions = stub_motions(m, {3.0, 1.0, 2.0}, {});
    ClusterConfig cfg;
    cfg.method = ClusterMethod::None;
    const auto out = cluster_motions(std::move(motions), cfg, m, rng);
    REQUIRE(out.size() == 3);
    CHECK(out[0].h == 1.0);
    CHECK(out[1].h == 2.0);
    CHECK(out[2].h == 3.0);
  }

  SUBCASE("goc deterministic n=1 picks band leaders in order") {
    auto motions = stub_motions(m, {1.0, 1.04, 1.5, 2.0}, {});
    ClusterConfig cfg;
    cfg.method = ClusterMethod::Goc;
    cfg.selection = SelectionRule::Deterministic;
    cfg.n = 1;
    cfg.rho = 0.05;
    const auto out = cluster_motions(std::move(motions), cfg, m, rng);
    REQUIRE(out.size() == 3);
    CHECK(out[0].h == 1.0);
    CHECK(out[1].h == 1.5);
    CHECK(out[2].h == 2.0);
  }

  SUBCASE("scgoc emits each cluster inside-out") {
    std::vector<double> hs = {1.0, 1.1, 1.2, 5.0};
    std::vector<Eigen::Vector2d> finals = {
        {1.0, 0.0}, {1.2, 0.0}, {1.4, 0.0}, {-3.0, 0.0}};
    auto motions = stub_motions(m, hs, finals);
    ClusterConfig cfg;
    cfg.method = ClusterMethod::ScGoc;
    cfg.selection = SelectionRule::Vanilla;
    cfg.tau = 1.0;
    const auto out = cluster_motions(std::move(motions), cfg, m, rng);
    REQUIRE(out.size() == 4);
    // first cluster {1.0,1.1,1.2} inside-out: middle (1.1), 1.0, 1.2
    CHECK(out[0].h == 1.1);
    CHECK(out[1].h == 1.0);
    CHECK(out[2].h == 1.2);
    CHECK(out[3].h == 5.0);
  }
}

TEST_CASE("partition and width/radius properties on random sets") {
  const auto m = make_model(ModelId::Unicycle1st);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> hdist(0.0, 10.0);
  std::uniform_real_distribution<double> p(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int count = 1 + trial % 40;
    std::vector<double> hs;
    std::vector<Eigen::Vector2d> finals;
    for (int i = 0; i < count; ++i) {
      hs.push_back(hdist(rng));
      finals.emplace_back(p(rng), p(rng));
    }
    auto motions = stub_motions(m, hs, finals);

    const double rho = 0.05 + 0.2 * (trial % 4);
    const auto gc = goc_cluster(motions, rho);
    std::vector<int> seen(count, 0);
    const double width = rho * (*std::max_element(hs.begin(), hs.end()) -
                                *std::min_element(hs.begin(), hs.end()));
    for (const auto& c : gc) {
      REQUIRE(!c.members.empty());
      double mn = 1e18, mx = -1e18;
      for (int i : c.members) {
        ++seen[i];
        mn = std::min(mn, motions[i].h);
        mx = std::max(mx, motions[i].h);
      }
      REQUIRE(mx - mn <= 2 * width + 1e-12);
    }
    for (int s : seen) REQUIRE(s == 1);  // partition

    const double tau = 0.5 + (trial % 3);
    const auto sc = scgoc_cluster(motions, m, tau);
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& c : sc) {
      REQUIRE(!c.members.empty());
      const State ref = motions[c.members.front()].final_state();
      for (int i : c.members) {
        ++seen[i];
        REQUIRE(m.distance(motions[i].final_state(), ref) <= tau + 1e-12);
      }
      // members sorted by h
      for (size_t k = 1; k < c.members.size(); ++k)
        REQUIRE(motions[c.members[k - 1]].h <= motions[c.members[k]].h);
    }
    for (int s : seen) REQUIRE(s == 1);

    // GOC equals the definition oracle on h multisets
    const auto oracle = goc_oracle(hs, rho);
    REQUIRE(gc.size() == oracle.size());
    for (size_t c = 0; c < gc.size(); ++c)
      REQUIRE(cluster_hs(motions, gc[c]) == oracle[c]);
  }
}

TEST_SUITE_END();
