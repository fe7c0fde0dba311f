#include "dblacam/dbpibt.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dblacam {

std::vector<int> assign_priorities(
    const std::vector<const DynamicsModel*>& models,
    const std::vector<State>& states, const std::vector<State>& goals) {
  const int n = static_cast<int>(states.size());
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i)
    dist[i] = models[i]->distance(states[i], goals[i]);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[a] != dist[b]) return dist[a] > dist[b];
    return a < b;
  });
  return order;
}

namespace {

struct PibtState {
  const std::vector<std::vector<RolledMotion>>& sets;
  std::vector<const RolledMotion*> reserved;
  std::vector<bool> visited;
  double margin;
  PibtCounters& counters;
  StageTimers* timers;

  bool collide(const RolledMotion& a, const RolledMotion& b) {
    ++counters.collide_calls;
    return motions_collide(a, b, margin);
  }

  bool plan(int i) {
    ++counters.frames;
    visited[i] = true;
    const int n = static_cast<int>(sets.size());
    for (const RolledMotion& m : sets[i]) {
      ++counters.motion_iterations;
      {
        ScopedTimer t(timers ? &timers->collision_planned_s : nullptr);
        bool clash = false;
        for (int j = 0; j < n && !clash; ++j)
          clash = reserved[j] && collide(m, *reserved[j]);
        if (clash) continue;
      }
      reserved[i] = &m;
      bool consistent = true;
      for (int j = 0; j < n; ++j) {
        if (visited[j] || reserved[j]) continue;
        bool conflicts = false;
        {
          ScopedTimer t(timers ? &timers->collision_unplanned_s : nullptr);
          for (const RolledMotion& mj : sets[j]) {
            if (collide(m, mj)) {
              conflicts = true;
              break;
            }
          }
        }
        if (conflicts && !plan(j)) {
          consistent = false;
          break;
        }
      }
      if (consistent) return true;
      reserved[i] = nullptr;  // priority-inheriting robot failed; roll back
    }
    return false;
  }
};

}  // namespace

PibtResult dbpibt_plan(
    const std::vector<std::vector<RolledMotion>>& motion_sets,
    const std::vector<int>& priority_order,
    const std::vector<std::pair<int, RolledMotion>>& constraints,
    double margin, PibtCounters* counters, StageTimers* timers) {
  const int n = static_cast<int>(motion_sets.size());
  PibtCounters local;
  PibtCounters& ctr = counters ? *counters : local;
  PibtState st{motion_sets, std::vector<const RolledMotion*>(n, nullptr),
               std::vector<bool>(n, false), margin, ctr, timers};

  PibtResult out;
  for (const auto& [robot, motion] : constraints) {
    if (robot < 0 || robot >= n)
      throw std::invalid_argument("dbpibt: constraint robot out of range");
    for (int j = 0; j < n; ++j) {
      if (st.reserved[j] && st.collide(motion, *st.reserved[j])) return out;
    }
    st.reserved[robot] = &motion;
    st.visited[robot] = true;
  }

  for (int i : priority_order) {
    if (st.reserved[i]) continue;
    if (st.visited[i] || !st.plan(i)) return out;  // no consistent table
  }

  out.success = true;
  out.reserved.reserve(n);
  for (int i = 0; i < n; ++i) out.reserved.push_back(*st.reserved[i]);
  return out;
}

}  // namespace dblacam
