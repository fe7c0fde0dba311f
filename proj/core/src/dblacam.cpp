#include "dblacam/dblacam.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

namespace dblacam {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double default_rho(ModelId id) {
  switch (id) {
    case ModelId::Unicycle1st:
    case ModelId::DoubleIntegrator2d:
      return 0.05;
    case ModelId::DoubleIntegrator3d:
    case ModelId::CarWithTrailer:
      return 1.0;
  }
  return 0.05;
}

struct KeyHash {
  size_t operator()(const std::vector<int64_t>& key) const {
    size_t h = 1469598103934665603ull;
    for (int64_t v : key) {
      h ^= static_cast<size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

std::vector<const DynamicsModel*> model_pointers(const Scenario& s) {
  std::vector<const DynamicsModel*> out;
  out.reserve(s.robots.size());
  for (const auto& r : s.robots) out.push_back(&r.model);
  return out;
}

bool joint_at_goal(const Scenario& s, const std::vector<State>& joint) {
  for (int i = 0; i < s.robot_count(); ++i) {
    if (s.robots[i].model.distance(joint[i], s.robots[i].goal) > s.delta_g)
      return false;
  }
  return true;
}

/// Concatenates per-horizon reservations into per-robot trajectories,
/// trims trailing exact-hold segments, and prices each robot at
/// steps-until-last-outside-delta_g times dt.
Solution assemble_solution(
    const Scenario& scenario,
    const std::vector<const std::vector<RolledMotion>*>& horizons) {
  Solution sol;
  sol.robots.resize(scenario.robot_count());
  for (int i = 0; i < scenario.robot_count(); ++i) {
    const RobotSpec& spec = scenario.robots[i];
    const int dx = spec.model.state_dim;
    const int du = spec.model.control_dim;
    int steps = 0;
    for (const auto* h : horizons) steps += (*h)[i].steps();
    Eigen::MatrixXd states(steps + 1, dx);
    Eigen::MatrixXd controls(steps, du);
    states.row(0) = spec.start;
    int at = 0;
    for (const auto* h : horizons) {
      const RolledMotion& m = (*h)[i];
      const int k = m.steps();
      states.block(at + 1, 0, k, dx) = m.states.bottomRows(k);
      controls.block(at, 0, k, du) = m.controls;
      at += k;
    }
    // trim the trailing run of bitwise-identical states
    int last = steps;
    while (last > 0 &&
           (states.row(last - 1).array() == states.row(last).array()).all())
      --last;
    RobotTrajectory traj;
    traj.states = states.topRows(last + 1);
    traj.controls = controls.topRows(last);
    int outside_until = 0;
    for (int k = 0; k <= last; ++k) {
      if (spec.model.distance(traj.states.row(k).transpose(), spec.goal) >
          scenario.delta_g)
        outside_until = k + 1;
    }
    traj.cost_s = outside_until * spec.model.dt;
    sol.cost_s += traj.cost_s;
    sol.robots[i] = std::move(traj);
  }
  return sol;
}

}  // namespace

MotionPipeline::MotionPipeline(
    const Scenario& scenario,
    std::vector<std::shared_ptr<const PrimitiveSet>> sets,
    const PlannerConfig& cfg, StageTimers* timers, std::mt19937_64* rng)
    : scenario_(scenario),
      sets_(std::move(sets)),
      cfg_(cfg),
      timers_(timers),
      rng_(rng) {
  if (static_cast<int>(sets_.size()) != scenario.robot_count())
    throw std::invalid_argument("pipeline: one primitive set per robot required");
  const int horizon = sets_.empty() ? 0 : sets_[0]->horizon();
  for (int i = 0; i < scenario.robot_count(); ++i) {
    const DynamicsModel& m = scenario.robots[i].model;
    const PrimitiveSet& set = *sets_[i];
    if (set.model().id != m.id)
      throw std::invalid_argument("pipeline: primitive set model mismatch");
    if (set.model().dt != m.dt || set.horizon() != horizon)
      throw std::invalid_argument(
          "pipeline: primitive sets must share dt and horizon");
    for (const auto& p : set.primitives()) {
      for (int k = 0; k < p.controls.rows(); ++k) {
        if (!m.control_in_bounds(p.controls.row(k).transpose()))
          throw std::invalid_argument(
              "pipeline: primitive controls exceed the scenario's bounds");
      }
    }
    HestConfig hc;
    hc.mode = cfg_.heuristic_mode;
    hc.nn_threshold = cfg_.nn_threshold;
    hc.est_budget = cfg_.est_budget;
    hc.fallback_inflation = cfg_.fallback_inflation;
    hc.grid_resolution = cfg_.grid_resolution;
    hc.goal_tolerance = scenario.delta_g;
    hc.applicable_radius = scenario.alpha * scenario.delta;
    hc.strict_goal = false;  // unreachable goals exhaust the search instead
    heuristics_.push_back(std::make_unique<RobotHeuristic>(
        m, scenario.workspace, scenario.robots[i].shape, scenario.robots[i].goal,
        sets_[i], hc));
  }
}

std::vector<std::vector<RolledMotion>> MotionPipeline::prepare(
    const std::vector<State>& joint) {
  ScopedTimer t(timers_ ? &timers_->rollout_s : nullptr);
  std::vector<std::vector<RolledMotion>> out(scenario_.robot_count());
  const double radius = scenario_.alpha * scenario_.delta;
  for (int i = 0; i < scenario_.robot_count(); ++i) {
    const RobotSpec& spec = scenario_.robots[i];
    sets_[i]->applicable(joint[i], radius, scratch_ids_);
    out[i] = rollout_applicable(spec.model, scenario_.workspace, spec.shape,
                                joint[i], *sets_[i], scratch_ids_, i);
  }
  return out;
}

std::vector<std::vector<RolledMotion>> MotionPipeline::refine(
    std::vector<std::vector<RolledMotion>> rolled,
    const std::vector<bool>& scgoc_override) {
  for (int i = 0; i < scenario_.robot_count(); ++i) {
    const RobotSpec& spec = scenario_.robots[i];
    {
      ScopedTimer t(timers_ ? &timers_->heuristic_s : nullptr);
      heuristics_[i]->assign(rolled[i], *rng_);
    }
    ScopedTimer t(timers_ ? &timers_->clustering_s : nullptr);
    ClusterConfig cc = cfg_.cluster;
    if (cc.rho < 0.0) cc.rho = default_rho(spec.model.id);
    if (!scgoc_override.empty() && scgoc_override[i])
      cc.method = ClusterMethod::ScGoc;
    rolled[i] = cluster_motions(std::move(rolled[i]), cc, spec.model, *rng_);
  }
  return rolled;
}

std::vector<std::vector<RolledMotion>> MotionPipeline::process(
    const std::vector<State>& joint, const std::vector<bool>& scgoc_override) {
  return refine(prepare(joint), scgoc_override);
}

std::vector<int64_t> explored_key(const DynamicsModel& model, const State& x,
                                  double res_linear, double res_angle) {
  std::vector<int64_t> key;
  key.reserve(model.state_dim);
  for (int d = 0; d < model.state_dim; ++d) {
    if (model.angle_wrap[d]) {
      const int cells =
          std::max<int>(1, static_cast<int>(std::round(2.0 * kPi / res_angle)));
      const double eff = 2.0 * kPi / cells;
      const double u = (wrap_angle(x[d]) + kPi) / eff + 0.5;
      int64_t idx = static_cast<int64_t>(std::floor(u)) % cells;
      if (idx < 0) idx += cells;
      key.push_back(idx);
    } else {
      key.push_back(static_cast<int64_t>(std::floor(x[d] / res_linear)));
    }
  }
  return key;
}

std::vector<int64_t> explored_key(
    const std::vector<const DynamicsModel*>& models,
    const std::vector<State>& joint, double res_linear, double res_angle) {
  std::vector<int64_t> key;
  for (size_t i = 0; i < joint.size(); ++i) {
    const auto part = explored_key(*models[i], joint[i], res_linear, res_angle);
    key.insert(key.end(), part.begin(), part.end());
  }
  return key;
}

std::vector<int> livelock_flagged(const HighLevelNode* node, int window,
                                  int min_alternations) {
  std::vector<const HighLevelNode*> chain;
  for (const HighLevelNode* q = node; q && static_cast<int>(chain.size()) < window;
       q = q->parent)
    chain.push_back(q);
  std::reverse(chain.begin(), chain.end());  // oldest first
  std::vector<int> flagged;
  if (chain.size() < 2) return flagged;
  const int n = static_cast<int>(chain.front()->h_trace.size());
  for (int i = 0; i < n; ++i) {
    int run = 0;
    double prev_delta = 0.0;
    bool have_prev = false;
    bool hit = false;
    for (size_t t = 1; t < chain.size() && !hit; ++t) {
      const double a = chain[t - 1]->h_trace[i];
      const double b = chain[t]->h_trace[i];
      if (std::isnan(a) || std::isnan(b)) {
        run = 0;
        have_prev = false;
        continue;
      }
      const double delta = b - a;
      if (delta == 0.0) {
        run = 0;
        have_prev = false;
        continue;
      }
      if (!have_prev) {
        run = 1;
      } else {
        run = (prev_delta * delta < 0.0) ? run + 1 : 1;
      }
      prev_delta = delta;
      have_prev = true;
      if (run >= min_alternations) hit = true;
    }
    if (hit) flagged.push_back(i);
  }
  return flagged;
}

PlanResult plan_dblacam(const Scenario& scenario,
                        std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                        const PlannerConfig& cfg) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(cfg.time_limit_s));
  PlanResult result;
  PlanStats& stats = result.stats;
  std::mt19937_64 rng(cfg.seed);
  MotionPipeline pipeline(scenario, sets, cfg, &stats.timers, &rng);
  const auto models = model_pointers(scenario);
  const auto goals = scenario.goals();
  const int n = scenario.robot_count();
  const double res_linear =
      cfg.explored_res_linear > 0.0 ? cfg.explored_res_linear : scenario.delta / 2.0;

  std::deque<HighLevelNode> nodes;
  std::vector<HighLevelNode*> open;
  std::unordered_set<std::vector<int64_t>, KeyHash> explored;
  const HighLevelNode* rolled_cache_node = nullptr;
  std::vector<std::vector<RolledMotion>> rolled_cache;

  auto make_node = [&](std::vector<State> state, HighLevelNode* parent,
                       std::vector<RolledMotion> motions) -> HighLevelNode* {
    nodes.emplace_back();
    HighLevelNode& q = nodes.back();
    q.state = std::move(state);
    q.parent = parent;
    q.motions = std::move(motions);
    q.arena.emplace_back();  // fresh root constraint
    q.tree.push_back(&q.arena.back());
    q.h_trace.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < static_cast<int>(q.motions.size()); ++i)
      q.h_trace[i] = q.motions[i].h;
    q.scgoc_flags =
        parent ? parent->scgoc_flags : std::vector<bool>(n, false);
    return &q;
  };

  std::vector<State> starts;
  for (const auto& r : scenario.robots) starts.push_back(r.model.wrapped(r.start));
  HighLevelNode* root = make_node(std::move(starts), nullptr, {});
  open.push_back(root);
  explored.insert(
      explored_key(models, root->state, res_linear, cfg.explored_res_angle));

  auto finish = [&](PlanStatus status) {
    stats.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
    for (int i = 0; i < n; ++i) {
      const auto& hs = pipeline.heuristic(i).stats();
      stats.est_calls += hs.est_calls;
      stats.est_expansions += hs.est_expansions;
      stats.table_hits += hs.table_hits;
      stats.heuristic_queries += hs.queries;
    }
    result.status = status;
    return result;
  };

  static const bool trace = std::getenv("DBLACAM_TRACE") != nullptr;
  while (true) {
    if (Clock::now() >= deadline) return finish(PlanStatus::Timeout);
    if (open.empty()) return finish(PlanStatus::NoSolution);
    HighLevelNode* q = open.back();

    if (trace && stats.iterations % 1000 == 0) {
      double sum_d = 0.0;
      double max_d = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = models[i]->distance(q->state[i], goals[i]);
        sum_d += d;
        max_d = std::max(max_d, d);
      }
      std::fprintf(stderr,
                   "[trace] it=%lld open=%zu nodes=%lld sum_d=%.2f max_d=%.2f "
                   "tree=%zu\n",
                   stats.iterations, open.size(), stats.nodes, sum_d, max_d,
                   q->tree.size());
    }

    if (joint_at_goal(scenario, q->state)) {
      std::vector<const std::vector<RolledMotion>*> horizons;
      for (HighLevelNode* p = q; p->parent; p = p->parent)
        horizons.push_back(&p->motions);
      std::reverse(horizons.begin(), horizons.end());
      result.solution = assemble_solution(scenario, horizons);
      result.solution.expansions = stats.iterations;
      return finish(PlanStatus::Solved);
    }
    if (q->tree.empty()) {
      open.pop_back();
      continue;
    }
    if (cfg.max_iterations >= 0 && stats.iterations >= cfg.max_iterations)
      return finish(PlanStatus::IterationLimit);
    ++stats.iterations;

    ConstraintNode* c = q->tree.front();
    q->tree.pop_front();

    if (q != rolled_cache_node) {
      rolled_cache = pipeline.prepare(q->state);
      rolled_cache_node = q;
    }
    auto motions = pipeline.refine(rolled_cache, q->scgoc_flags);
    if (q->order.empty())
      q->order = assign_priorities(models, q->state, goals);

    if (c->depth < n) {
      const int robot = q->order[c->depth];
      for (const RolledMotion& m : motions[robot]) {
        q->arena.push_back(
            ConstraintNode{c, robot, m.final_state(), m, c->depth + 1});
        q->tree.push_back(&q->arena.back());
      }
    }

    std::vector<std::pair<int, RolledMotion>> constraints;
    for (ConstraintNode* a = c; a && a->who >= 0; a = a->parent)
      constraints.emplace_back(a->who, a->motion);

    PibtResult pibt = dbpibt_plan(motions, q->order, constraints, cfg.margin,
                                  &stats.pibt, &stats.timers);
    if (!pibt.success) continue;

    std::vector<State> next;
    next.reserve(n);
    for (const auto& m : pibt.reserved) next.push_back(m.final_state());
    auto key = explored_key(models, next, res_linear, cfg.explored_res_angle);
    if (!explored.insert(std::move(key)).second) continue;

    HighLevelNode* child =
        make_node(std::move(next), q, std::move(pibt.reserved));
    open.push_back(child);
    ++stats.nodes;

    if (cfg.livelock) {
      for (int r :
           livelock_flagged(child, cfg.livelock_window, cfg.livelock_alternations)) {
        if (!child->scgoc_flags[r]) {
          child->scgoc_flags[r] = true;
          stats.livelock_robots.push_back(r);
        }
      }
    }
  }
}

PlanResult plan_dbpibt(const Scenario& scenario,
                       std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                       const PlannerConfig& cfg) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(cfg.time_limit_s));
  PlanResult result;
  PlanStats& stats = result.stats;
  std::mt19937_64 rng(cfg.seed);
  MotionPipeline pipeline(scenario, sets, cfg, &stats.timers, &rng);
  const auto models = model_pointers(scenario);
  const auto goals = scenario.goals();

  std::vector<State> joint;
  for (const auto& r : scenario.robots) joint.push_back(r.model.wrapped(r.start));
  std::vector<std::vector<RolledMotion>> horizons;

  auto finish = [&](PlanStatus status) {
    stats.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
    for (int i = 0; i < scenario.robot_count(); ++i) {
      const auto& hs = pipeline.heuristic(i).stats();
      stats.est_calls += hs.est_calls;
      stats.est_expansions += hs.est_expansions;
      stats.table_hits += hs.table_hits;
      stats.heuristic_queries += hs.queries;
    }
    result.status = status;
    return result;
  };

  while (true) {
    if (joint_at_goal(scenario, joint)) {
      std::vector<const std::vector<RolledMotion>*> ptrs;
      for (const auto& h : horizons) ptrs.push_back(&h);
      result.solution = assemble_solution(scenario, ptrs);
      result.solution.expansions = stats.iterations;
      return finish(PlanStatus::Solved);
    }
    if (Clock::now() >= deadline) return finish(PlanStatus::Timeout);
    if (stats.iterations >= cfg.horizon_cap) return finish(PlanStatus::HorizonCap);
    ++stats.iterations;

    auto motions = pipeline.process(joint, {});
    const auto order = assign_priorities(models, joint, goals);
    PibtResult pibt =
        dbpibt_plan(motions, order, {}, cfg.margin, &stats.pibt, &stats.timers);
    if (!pibt.success) return finish(PlanStatus::NoSolution);
    for (int i = 0; i < scenario.robot_count(); ++i)
      joint[i] = pibt.reserved[i].final_state();
    horizons.push_back(std::move(pibt.reserved));
  }
}

PlanResult plan_incremental(const Scenario& scenario,
                            std::vector<std::shared_ptr<const PrimitiveSet>> sets,
                            const PlannerConfig& cfg, int grow) {
  const auto t0 = Clock::now();
  PlanResult last;
  PlannerConfig attempt_cfg = cfg;
  if (attempt_cfg.max_iterations < 0) attempt_cfg.max_iterations = 2000;
  uint64_t grow_seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
  for (int attempt = 0;; ++attempt) {
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - t0).count();
    const double remaining = cfg.time_limit_s - elapsed;
    if (remaining <= 0.0) {
      last.status = PlanStatus::Timeout;
      return last;
    }
    attempt_cfg.time_limit_s = remaining;
    attempt_cfg.seed = cfg.seed + attempt;
    last = plan_dblacam(scenario, sets, attempt_cfg);
    if (last.status == PlanStatus::Solved || last.status == PlanStatus::Timeout)
      return last;

    // grow each distinct set, preserving sharing across robots
    std::map<const PrimitiveSet*, std::shared_ptr<const PrimitiveSet>> grown;
    for (auto& set : sets) {
      auto it = grown.find(set.get());
      if (it == grown.end()) {
        PrimitiveSet bigger = *set;
        PrimitiveSet fresh =
            generate_primitives(set->model(), grow, set->horizon(), ++grow_seed);
        std::vector<MotionPrimitive> extra;
        for (const auto& p : fresh.primitives()) {
          bool dup = false;
          for (const auto& q : bigger.primitives()) {
            if (bigger.model().distance(p.states.bottomRows(1).transpose(),
                                        q.states.bottomRows(1).transpose()) <
                0.01) {
              dup = true;
              break;
            }
          }
          if (!dup) extra.push_back(p);
        }
        bigger.append(std::move(extra));
        it = grown
                 .emplace(set.get(),
                          std::make_shared<const PrimitiveSet>(std::move(bigger)))
                 .first;
      }
      set = it->second;
    }
  }
}

}  // namespace dblacam
