#include "dblacam/heuristics.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <limits>
#include <queue>

namespace dblacam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GridWavefront::GridWavefront(const Workspace& ws, double robot_radius,
                             const Eigen::Vector3d& goal_position,
                             double resolution)
    : dim_(ws.dim), resolution_(resolution), goal_(goal_position) {
  origin_ = ws.lower;
  nx_ = std::max(1, static_cast<int>(std::ceil((ws.upper.x() - ws.lower.x()) / resolution)));
  ny_ = std::max(1, static_cast<int>(std::ceil((ws.upper.y() - ws.lower.y()) / resolution)));
  nz_ = dim_ == 3
            ? std::max(1, static_cast<int>(std::ceil((ws.upper.z() - ws.lower.z()) / resolution)))
            : 1;
  const int total = nx_ * ny_ * nz_;
  dist_.assign(total, kInf);
  blocked_.assign(total, false);

  auto center_of = [&](int ix, int iy, int iz) {
    return Eigen::Vector3d(origin_.x() + (ix + 0.5) * resolution_,
                           origin_.y() + (iy + 0.5) * resolution_,
                           dim_ == 3 ? origin_.z() + (iz + 0.5) * resolution_ : 0.0);
  };
  for (int iz = 0; iz < nz_; ++iz) {
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        const int id = (iz * ny_ + iy) * nx_ + ix;
        blocked_[id] = !sphere_free(ws, robot_radius, center_of(ix, iy, iz));
      }
    }
  }

  const int goal_id = cell_index(goal_position);
  goal_blocked_ = goal_id < 0 || blocked_[goal_id];
  if (goal_id < 0) return;

  // Dijkstra from the goal cell (seeded even when blocked, so estimates
  // around an in-collision goal still flow through free space).
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist_[goal_id] = 0.0;
  open.emplace(0.0, goal_id);
  while (!open.empty()) {
    auto [d, id] = open.top();
    open.pop();
    if (d > dist_[id]) continue;
    const int iz = id / (nx_ * ny_);
    const int iy = (id / nx_) % ny_;
    const int ix = id % nx_;
    for (int dz = -1; dz <= 1; ++dz) {
      if (dim_ == 2 && dz != 0) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const int jx = ix + dx, jy = iy + dy, jz = iz + dz;
          if (jx < 0 || jx >= nx_ || jy < 0 || jy >= ny_ || jz < 0 || jz >= nz_)
            continue;
          const int jd = (jz * ny_ + jy) * nx_ + jx;
          if (blocked_[jd]) continue;
          const double step =
              resolution_ * std::sqrt(double(dx * dx + dy * dy + dz * dz));
          if (dist_[id] + step < dist_[jd]) {
            dist_[jd] = dist_[id] + step;
            open.emplace(dist_[jd], jd);
          }
        }
      }
    }
  }
}

int GridWavefront::cell_index(const Eigen::Vector3d& p) const {
  const int ix = static_cast<int>(std::floor((p.x() - origin_.x()) / resolution_));
  const int iy = static_cast<int>(std::floor((p.y() - origin_.y()) / resolution_));
  const int iz = dim_ == 3
                     ? static_cast<int>(std::floor((p.z() - origin_.z()) / resolution_))
                     : 0;
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_ || iz < 0 || iz >= nz_)
    return -1;
  return (iz * ny_ + iy) * nx_ + ix;
}

double GridWavefront::distance_at(const Eigen::Vector3d& p) const {
  const int id = cell_index(p);
  double euclid = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = p[i] - goal_[i];
    euclid += d * d;
  }
  euclid = std::sqrt(euclid);
  if (id < 0 || blocked_[id] || !std::isfinite(dist_[id])) return euclid;
  return std::max(dist_[id], 0.0);
}

RobotHeuristic::RobotHeuristic(const DynamicsModel& model, const Workspace& ws,
                               CollisionShape shape, State goal,
                               std::shared_ptr<const PrimitiveSet> primitives,
                               HestConfig config)
    : model_(model),
      ws_(ws),
      shape_(std::move(shape)),
      goal_(model.wrapped(std::move(goal))),
      primitives_(std::move(primitives)),
      cfg_(config),
      wavefront_(ws, shape_.bounding_radius(model.position_dim),
                 [&] {
                   Eigen::Vector3d g = Eigen::Vector3d::Zero();
                   g.head(model.position_dim) = goal_.head(model.position_dim);
                   return g;
                 }(),
                 config.grid_resolution),
      v_max_(model.max_speed()),
      table_(model.metric_weights, model.angle_wrap, model.position_dim) {
  if (cfg_.strict_goal && !state_free(ws_, shape_, model_, goal_))
    throw InvalidGoal("goal state is in collision");
}

double RobotHeuristic::reverse_estimate(const State& x) const {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  p.head(model_.position_dim) = x.head(model_.position_dim);
  return wavefront_.distance_at(p) / v_max_;
}

void RobotHeuristic::insert_entry(const State& x, double h) {
  table_h_.push_back(h);
  table_states_.push_back(model_.wrapped(x));
  table_.insert(table_states_.back(), static_cast<int>(table_h_.size()) - 1);
}

double RobotHeuristic::table_lookup(const State& x) const {
  // lower envelope over all entries in reach: min_i h_i + d(x, entry_i)/v_max.
  // Far more consistent than a single nearest entry when cached path
  // durations disagree, and equal to the entry value at distance zero.
  table_.radius_search(x, cfg_.nn_threshold, scratch_ids_);
  if (scratch_ids_.empty()) return -1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int id : scratch_ids_) {
    const double h = table_h_[id];
    if (h >= best) continue;  // gap is nonnegative
    best = std::min(best, h + model_.distance(table_states_[id], x) / v_max_);
  }
  return best;
}

double RobotHeuristic::forward_estimate(const State& x, std::mt19937_64& rng) {
  ++stats_.est_calls;

  struct EstNode {
    State state;
    int parent;
    double cost;      // seconds from the query state
    double weight;    // 1/(1 + density) * 1/(1 + reverse_estimate)
    double guide;     // 1 / (1 + reverse_estimate)
    int density = 1;  // tree nodes within density_radius, incl. self
    bool expandable = true;
  };
  std::vector<EstNode> nodes;
  KdTree node_index(model_.metric_weights, model_.angle_wrap, model_.position_dim);
  double weight_envelope = 0.0;  // upper bound on max node weight
  int dead = 0;

  auto add_node = [&](State s, int parent, double cost) {
    EstNode n;
    n.state = model_.wrapped(std::move(s));
    n.parent = parent;
    n.cost = cost;
    n.guide = 1.0 / (1.0 + reverse_estimate(n.state));
    node_index.radius_search(n.state, cfg_.density_radius, scratch_ids_);
    n.density = 1 + static_cast<int>(scratch_ids_.size());
    for (int id : scratch_ids_) {
      EstNode& nb = nodes[id];
      ++nb.density;
      nb.weight = nb.guide / (1.0 + nb.density);
    }
    n.weight = n.guide / (1.0 + n.density);
    weight_envelope = std::max(weight_envelope, n.weight);
    node_index.insert(n.state, static_cast<int>(nodes.size()));
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  };

  // reaching the goal ball or any cached state completes a path whose tail
  // cost is already known (plus the residual gap, converted to time)
  auto finish_value = [&](const State& s) -> double {
    if (model_.distance(s, goal_) <= cfg_.goal_tolerance) return 0.0;
    return table_lookup(s);
  };

  add_node(x, -1, 0.0);
  const double horizon_s = primitives_->horizon() * model_.dt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> candidates;

  for (int iter = 0; iter < cfg_.est_budget; ++iter) {
    ++stats_.est_expansions;
    if (dead == static_cast<int>(nodes.size())) break;
    // rejection-sampled selection under the weight envelope
    int chosen = -1;
    for (int tries = 0; tries < 64 && chosen < 0; ++tries) {
      std::uniform_int_distribution<size_t> pick(0, nodes.size() - 1);
      const size_t i = pick(rng);
      if (!nodes[i].expandable) continue;
      if (unit(rng) * weight_envelope <= nodes[i].weight)
        chosen = static_cast<int>(i);
    }
    if (chosen < 0) {  // envelope went stale; fall back to a linear scan
      double best = -1.0;
      for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        if (nodes[i].expandable && nodes[i].weight > best) {
          best = nodes[i].weight;
          chosen = i;
        }
      }
      if (chosen < 0) break;
      weight_envelope = best;
    }

    primitives_->applicable(nodes[chosen].state, cfg_.applicable_radius,
                            candidates);
    if (candidates.empty()) {
      nodes[chosen].expandable = false;
      ++dead;
      continue;
    }
    std::uniform_int_distribution<size_t> pick_dist(0, candidates.size() - 1);
    const MotionPrimitive& prim = primitives_->at(candidates[pick_dist(rng)]);
    RolloutResult r = model_.rollout(nodes[chosen].state, prim.controls);
    if (!r.in_bounds) continue;
    bool free = true;
    for (int k = 0; k < r.states.rows() && free; ++k)
      free = state_free(ws_, shape_, model_, r.states.row(k).transpose());
    if (!free) continue;

    const int added = add_node(r.states.row(r.states.rows() - 1).transpose(),
                               chosen, nodes[chosen].cost + horizon_s);
    const double tail = finish_value(nodes[added].state);
    if (tail >= 0.0) {
      // cache remaining durations along the solution path
      const double total_cost = nodes[added].cost + tail;
      for (int i = added; i >= 0; i = nodes[i].parent)
        insert_entry(nodes[i].state, total_cost - nodes[i].cost);
      return total_cost;
    }
  }

  ++stats_.fallbacks;
  return reverse_estimate(x) * cfg_.fallback_inflation;
}

double RobotHeuristic::query(const State& x, std::mt19937_64& rng) {
  ++stats_.queries;
  const State xw = model_.wrapped(x);
  if (model_.distance(xw, goal_) <= cfg_.goal_tolerance) {
    ++stats_.goal_hits;
    return 0.0;
  }
  if (cfg_.mode == HeuristicMode::ReverseGridOnly) return reverse_estimate(xw);
  if (const double h = table_lookup(xw); h >= 0.0) {
    ++stats_.table_hits;
    return h;
  }
  return forward_estimate(xw, rng);
}

void RobotHeuristic::assign(std::vector<RolledMotion>& motions,
                            std::mt19937_64& rng) {
  // query nearest-goal endpoints first: their EST succeeds soonest and the
  // cached path states then serve the rest of the batch
  std::vector<int> order(motions.size());
  std::iota(order.begin(), order.end(), 0);
  for (auto& m : motions)
    m.goal_distance = model_.distance(m.final_state(), goal_);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return motions[a].goal_distance < motions[b].goal_distance;
  });
  for (int i : order) motions[i].h = query(motions[i].final_state(), rng);
}

}  // namespace dblacam
