#pragma once

#include <chrono>

namespace dblacam {

/// Wall-time accumulators for the planner's key components; attached to a
/// single planner instance, never shared across threads.
struct StageTimers {
  double heuristic_s = 0.0;
  double collision_unplanned_s = 0.0;
  double clustering_s = 0.0;
  double collision_planned_s = 0.0;
  double rollout_s = 0.0;
};

class ScopedTimer {
 public:
  explicit ScopedTimer(double* acc) : acc_(acc) {
    if (acc_) start_ = std::chrono::steady_clock::now();
  }
  ~ScopedTimer() {
    if (acc_)
      *acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
                   .count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double* acc_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dblacam
