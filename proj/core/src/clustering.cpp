#include "dblacam/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dblacam {

namespace {
constexpr double kWeightEpsilon = 1e-6;

// indices 0..n-1 sorted ascending by h; equal h falls back to the metric
// distance to goal, then input order, so plateaus still have a gradient
std::vector<int> h_order(const std::vector<RolledMotion>& motions) {
  std::vector<int> order(motions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (motions[a].h != motions[b].h) return motions[a].h < motions[b].h;
    return motions[a].goal_distance < motions[b].goal_distance;
  });
  return order;
}
}  // namespace

std::vector<Cluster> goc_cluster(const std::vector<RolledMotion>& motions,
                                 double rho) {
  std::vector<Cluster> clusters;
  if (motions.empty()) return clusters;
  const std::vector<int> order = h_order(motions);
  const double h_min = motions[order.front()].h;
  const double h_max = motions[order.back()].h;
  const double width = rho * (h_max - h_min);
  size_t i = 0;
  while (i < order.size()) {
    Cluster c;
    c.reference_h = motions[order[i]].h;
    while (i < order.size() && motions[order[i]].h - c.reference_h <= width) {
      c.members.push_back(order[i]);
      ++i;
    }
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::vector<Cluster> scgoc_cluster(const std::vector<RolledMotion>& motions,
                                   const DynamicsModel& model, double tau) {
  std::vector<Cluster> clusters;
  if (motions.empty()) return clusters;
  const std::vector<int> order = h_order(motions);
  std::vector<bool> assigned(motions.size(), false);
  for (int ref : order) {
    if (assigned[ref]) continue;
    Cluster c;
    c.reference_h = motions[ref].h;
    const State ref_final = motions[ref].final_state();
    for (int m : order) {
      if (assigned[m]) continue;
      if (model.distance(motions[m].final_state(), ref_final) <= tau) {
        assigned[m] = true;
        c.members.push_back(m);  // order[] is h-sorted, so members are too
      }
    }
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::vector<int> select_elements(const std::vector<RolledMotion>& motions,
                                 const Cluster& cluster,
                                 const ClusterConfig& cfg,
                                 std::mt19937_64& rng) {
  const auto& members = cluster.members;
  switch (cfg.selection) {
    case SelectionRule::Vanilla:
      return members;
    case SelectionRule::Deterministic: {
      const size_t n = std::min<size_t>(cfg.n, members.size());
      return {members.begin(), members.begin() + n};
    }
    case SelectionRule::Weighted: {
      std::vector<int> pool = members;
      std::vector<double> weight(pool.size());
      for (size_t i = 0; i < pool.size(); ++i)
        weight[i] = 1.0 / (motions[pool[i]].h + kWeightEpsilon);
      std::vector<int> out;
      const size_t n = std::min<size_t>(cfg.n, pool.size());
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      while (out.size() < n) {
        const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
        double pick = unit(rng) * total;
        size_t chosen = pool.size() - 1;
        for (size_t i = 0; i < pool.size(); ++i) {
          pick -= weight[i];
          if (pick <= 0.0) {
            chosen = i;
            break;
          }
        }
        out.push_back(pool[chosen]);
        pool.erase(pool.begin() + chosen);
        weight.erase(weight.begin() + chosen);
      }
      return out;
    }
  }
  return {};
}

std::vector<int> inside_out_reorder(const std::vector<int>& ordered) {
  const int n = static_cast<int>(ordered.size());
  std::vector<int> out;
  out.reserve(n);
  const int mid = (n + 1) / 2;  // ceil(n/2), 1-indexed
  for (int offset = 0; static_cast<int>(out.size()) < n; ++offset) {
    const int lo = mid - offset;
    const int hi = mid + offset;
    if (offset == 0) {
      out.push_back(ordered[mid - 1]);
      continue;
    }
    if (lo >= 1) out.push_back(ordered[lo - 1]);
    if (hi <= n) out.push_back(ordered[hi - 1]);
  }
  return out;
}

std::vector<RolledMotion> cluster_motions(std::vector<RolledMotion> motions,
                                          const ClusterConfig& cfg,
                                          const DynamicsModel& model,
                                          std::mt19937_64& rng) {
  std::vector<int> emit;
  switch (cfg.method) {
    case ClusterMethod::None:
      emit = h_order(motions);
      break;
    case ClusterMethod::Goc: {
      for (const Cluster& c : goc_cluster(motions, cfg.rho)) {
        const auto sel = select_elements(motions, c, cfg, rng);
        emit.insert(emit.end(), sel.begin(), sel.end());
      }
      break;
    }
    case ClusterMethod::ScGoc: {
      for (const Cluster& c : scgoc_cluster(motions, model, cfg.tau)) {
        const auto sel =
            inside_out_reorder(select_elements(motions, c, cfg, rng));
        emit.insert(emit.end(), sel.begin(), sel.end());
      }
      break;
    }
  }
  std::vector<RolledMotion> out;
  out.reserve(emit.size());
  for (int idx : emit) out.push_back(std::move(motions[idx]));
  return out;
}

}  // namespace dblacam
