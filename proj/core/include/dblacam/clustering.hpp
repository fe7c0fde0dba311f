#pragma once

#include <random>
#include <vector>

#include "dblacam/geometry.hpp"

namespace dblacam {

enum class ClusterMethod { None, Goc, ScGoc };
enum class SelectionRule { Vanilla, Deterministic, Weighted };

struct ClusterConfig {
  ClusterMethod method = ClusterMethod::Goc;
  SelectionRule selection = SelectionRule::Deterministic;
  int n = 5;          // elements selected per cluster
  double rho = 0.05;  // GOC band width fraction of the h range
  double tau = 1.0;   // SC-GOC final-state radius under the model metric
};

/// Indices into the motion list, sorted ascending by h. reference_h is the
/// h of the cluster's opening motion (GOC band start / SC-GOC reference).
struct Cluster {
  std::vector<int> members;
  double reference_h = 0.0;
};

/// Greedy h-band sweep: open at the smallest unassigned h, take everything
/// within rho * (h_max - h_min) of it. Clusters ordered by reference h.
std::vector<Cluster> goc_cluster(const std::vector<RolledMotion>& motions,
                                 double rho);

/// Space-cover clustering: reference = min-h unassigned motion, cluster =
/// all unassigned motions whose final states lie within tau of it.
std::vector<Cluster> scgoc_cluster(const std::vector<RolledMotion>& motions,
                                   const DynamicsModel& model, double tau);

/// vanilla: all members h-ascending; deterministic: top n by h; weighted:
/// n draws without replacement with probability proportional to 1/(h+eps),
/// ordered as drawn.
std::vector<int> select_elements(const std::vector<RolledMotion>& motions,
                                 const Cluster& cluster,
                                 const ClusterConfig& cfg,
                                 std::mt19937_64& rng);

/// <m_ceil(n/2), m_ceil(n/2)-1, m_ceil(n/2)+1, ...> on 1-indexed input.
std::vector<int> inside_out_reorder(const std::vector<int>& ordered);

/// Full pipeline: cluster by method, select per cluster, concatenate in
/// cluster order (SC-GOC selections are emitted inside-out). The result
/// order is db-PIBT's motion iteration order.
std::vector<RolledMotion> cluster_motions(std::vector<RolledMotion> motions,
                                          const ClusterConfig& cfg,
                                          const DynamicsModel& model,
                                          std::mt19937_64& rng);

}  // namespace dblacam
