#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace dblacam {

/// k-d tree over real vectors under the planner metric: an optional leading
/// Euclidean block (shared weight) plus weighted absolute differences with
/// optional wrap-around (circular) dims. Supports incremental insertion;
/// queries prune on per-subtree bounding boxes, so results are exact
/// regardless of insertion order.
class KdTree {
 public:
  KdTree() = default;
  KdTree(Eigen::VectorXd weights, std::vector<bool> circular,
         int euclid_prefix = 0);

  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  int dims() const { return static_cast<int>(weights_.size()); }

  /// Points on circular dims are expected wrapped to [-pi, pi).
  void insert(const Eigen::VectorXd& point, int payload);

  /// Balanced bulk build; payloads default to point indices.
  void build(const std::vector<Eigen::VectorXd>& points);

  double metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  struct Hit {
    int payload = -1;
    double dist = 0.0;
  };
  std::optional<Hit> nearest(const Eigen::VectorXd& query) const;

  /// Payloads of all points with metric(query, p) <= radius.
  void radius_search(const Eigen::VectorXd& query, double radius,
                     std::vector<int>& out) const;
  int count_within(const Eigen::VectorXd& query, double radius) const;

 private:
  struct Node {
    Eigen::VectorXd point;
    int payload = -1;
    int split = 0;
    int left = -1, right = -1;
    Eigen::VectorXd box_lo, box_hi;  // subtree bounds in raw coordinates
  };

  int insert_node(const Eigen::VectorXd& point, int payload, int depth);
  int build_range(std::vector<int>& order,
                  const std::vector<Eigen::VectorXd>& points, int lo, int hi,
                  int depth);
  double box_lower_bound(const Eigen::VectorXd& query, const Node& n) const;
  void nearest_impl(int idx, const Eigen::VectorXd& query, Hit& best) const;
  void radius_impl(int idx, const Eigen::VectorXd& query, double radius,
                   std::vector<int>* out, int& count) const;

  Eigen::VectorXd weights_;
  std::vector<bool> circular_;
  int euclid_prefix_ = 0;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace dblacam
