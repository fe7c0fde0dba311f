#include "dblacam/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dblacam {

namespace {
constexpr double kPi = 3.14159265358979323846;

double arc(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 2.0 * kPi - d);
}
}  // namespace

KdTree::KdTree(Eigen::VectorXd weights, std::vector<bool> circular,
               int euclid_prefix)
    : weights_(std::move(weights)),
      circular_(std::move(circular)),
      euclid_prefix_(euclid_prefix) {
  if (static_cast<size_t>(weights_.size()) != circular_.size())
    throw std::invalid_argument("kdtree: weights/circular size mismatch");
  for (int i = 0; i < euclid_prefix_; ++i) {
    if (circular_[i] || weights_[i] != weights_[0])
      throw std::invalid_argument(
          "kdtree: euclid block must be non-circular with one shared weight");
  }
}

double KdTree::metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  double sq = 0.0;
  for (int i = 0; i < euclid_prefix_; ++i) {
    const double delta = a[i] - b[i];
    sq += delta * delta;
  }
  double d = euclid_prefix_ > 0 ? weights_[0] * std::sqrt(sq) : 0.0;
  for (int i = euclid_prefix_; i < dims(); ++i) {
    d += weights_[i] * (circular_[i] ? arc(a[i], b[i]) : std::abs(a[i] - b[i]));
  }
  return d;
}

void KdTree::insert(const Eigen::VectorXd& point, int payload) {
  if (point.size() != weights_.size())
    throw std::invalid_argument("kdtree: point dimension mismatch");
  if (root_ < 0) {
    root_ = insert_node(point, payload, 0);
    return;
  }
  int idx = root_;
  int depth = 0;
  for (;;) {
    Node& n = nodes_[idx];
    n.box_lo = n.box_lo.cwiseMin(point);
    n.box_hi = n.box_hi.cwiseMax(point);
    int child = point[n.split] < n.point[n.split] ? n.left : n.right;
    if (child < 0) {
      int fresh = insert_node(point, payload, depth + 1);
      Node& parent = nodes_[idx];  // insert_node may reallocate
      (point[parent.split] < parent.point[parent.split] ? parent.left
                                                        : parent.right) = fresh;
      return;
    }
    idx = child;
    ++depth;
  }
}

int KdTree::insert_node(const Eigen::VectorXd& point, int payload, int depth) {
  Node n;
  n.point = point;
  n.payload = payload;
  n.split = depth % dims();
  n.box_lo = point;
  n.box_hi = point;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void KdTree::build(const std::vector<Eigen::VectorXd>& points) {
  nodes_.clear();
  root_ = -1;
  if (points.empty()) return;
  nodes_.reserve(points.size());
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  root_ = build_range(order, points, 0, static_cast<int>(points.size()), 0);
}

int KdTree::build_range(std::vector<int>& order,
                        const std::vector<Eigen::VectorXd>& points, int lo,
                        int hi, int depth) {
  if (lo >= hi) return -1;
  const int split = depth % dims();
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](int a, int b) { return points[a][split] < points[b][split]; });
  Node n;
  n.point = points[order[mid]];
  n.payload = order[mid];
  n.split = split;
  n.box_lo = n.point;
  n.box_hi = n.point;
  for (int i = lo; i < hi; ++i) {
    n.box_lo = n.box_lo.cwiseMin(points[order[i]]);
    n.box_hi = n.box_hi.cwiseMax(points[order[i]]);
  }
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  const int left = build_range(order, points, lo, mid, depth + 1);
  const int right = build_range(order, points, mid + 1, hi, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

double KdTree::box_lower_bound(const Eigen::VectorXd& query,
                               const Node& n) const {
  double sq = 0.0;
  for (int i = 0; i < euclid_prefix_; ++i) {
    const double lo = n.box_lo[i], hi = n.box_hi[i], q = query[i];
    const double gap = q < lo ? lo - q : (q > hi ? q - hi : 0.0);
    sq += gap * gap;
  }
  double d = euclid_prefix_ > 0 ? weights_[0] * std::sqrt(sq) : 0.0;
  for (int i = euclid_prefix_; i < dims(); ++i) {
    const double lo = n.box_lo[i], hi = n.box_hi[i], q = query[i];
    double delta = 0.0;
    if (q < lo || q > hi) {
      // Stored circular values lie in [-pi, pi); the subtree occupies the
      // raw arc [lo, hi], so an outside query is closest to an endpoint.
      delta = circular_[i] ? std::min(arc(q, lo), arc(q, hi))
                           : std::min(std::abs(q - lo), std::abs(q - hi));
    }
    d += weights_[i] * delta;
  }
  return d;
}

std::optional<KdTree::Hit> KdTree::nearest(const Eigen::VectorXd& query) const {
  if (root_ < 0) return std::nullopt;
  Hit best;
  best.dist = std::numeric_limits<double>::infinity();
  nearest_impl(root_, query, best);
  return best;
}

void KdTree::nearest_impl(int idx, const Eigen::VectorXd& query,
                          Hit& best) const {
  const Node& n = nodes_[idx];
  if (box_lower_bound(query, n) >= best.dist) return;
  const double d = metric(query, n.point);
  if (d < best.dist) {
    best.dist = d;
    best.payload = n.payload;
  }
  const int near_child =
      query[n.split] < n.point[n.split] ? n.left : n.right;
  const int far_child = near_child == n.left ? n.right : n.left;
  if (near_child >= 0) nearest_impl(near_child, query, best);
  if (far_child >= 0) nearest_impl(far_child, query, best);
}

void KdTree::radius_search(const Eigen::VectorXd& query, double radius,
                           std::vector<int>& out) const {
  out.clear();
  if (root_ < 0) return;
  int count = 0;
  radius_impl(root_, query, radius, &out, count);
}

int KdTree::count_within(const Eigen::VectorXd& query, double radius) const {
  if (root_ < 0) return 0;
  int count = 0;
  radius_impl(root_, query, radius, nullptr, count);
  return count;
}

void KdTree::radius_impl(int idx, const Eigen::VectorXd& query, double radius,
                         std::vector<int>* out, int& count) const {
  const Node& n = nodes_[idx];
  if (box_lower_bound(query, n) > radius) return;
  if (metric(query, n.point) <= radius) {
    ++count;
    if (out) out->push_back(n.payload);
  }
  if (n.left >= 0) radius_impl(n.left, query, radius, out, count);
  if (n.right >= 0) radius_impl(n.right, query, radius, out, count);
}

}  // namespace dblacam
