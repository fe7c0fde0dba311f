#include "dblacam/bench.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace dblacam {

namespace {
namespace fs = std::filesystem;

std::string model_signature(const DynamicsModel& m) {
  std::ostringstream os;
  os << std::setprecision(17) << to_string(m.id) << "|" << m.dt;
  auto dump = [&](const Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) os << "," << v[i];
    os << "|";
  };
  dump(m.state_lower);
  dump(m.state_upper);
  dump(m.control_lower);
  dump(m.control_upper);
  dump(m.metric_weights);
  os << m.wheelbase << "," << m.hitch_length;
  return os.str();
}

std::mutex g_set_cache_mutex;
std::map<std::string, std::shared_ptr<const PrimitiveSet>> g_set_cache;

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::Solved: return "solved";
    case PlanStatus::NoSolution: return "no_solution";
    case PlanStatus::Timeout: return "timeout";
    case PlanStatus::IterationLimit: return "iteration_limit";
    case PlanStatus::HorizonCap: return "horizon_cap";
  }
  return "unknown";
}

std::vector<std::shared_ptr<const PrimitiveSet>> primitive_sets_for(
    const Scenario& scenario, const RunnerConfig& cfg) {
  // pre-loaded files, keyed by model id
  std::map<std::string, std::shared_ptr<const PrimitiveSet>> loaded;
  for (const auto& path : cfg.primitive_files) {
    auto set = std::make_shared<const PrimitiveSet>(load_set(path));
    loaded[to_string(set->model().id)] = std::move(set);
  }

  std::vector<std::shared_ptr<const PrimitiveSet>> out;
  for (const auto& robot : scenario.robots) {
    if (auto it = loaded.find(to_string(robot.model.id)); it != loaded.end()) {
      out.push_back(it->second);
      continue;
    }
    const std::string key = model_signature(robot.model) + "#" +
                            std::to_string(cfg.prim_count) + "#" +
                            std::to_string(cfg.prim_horizon) + "#" +
                            std::to_string(cfg.prim_seed);
    std::lock_guard<std::mutex> lock(g_set_cache_mutex);
    auto it = g_set_cache.find(key);
    if (it == g_set_cache.end()) {
      auto set = std::make_shared<const PrimitiveSet>(generate_primitives(
          robot.model, cfg.prim_count, cfg.prim_horizon, cfg.prim_seed));
      it = g_set_cache.emplace(key, std::move(set)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

PlanResult run_planner(const Scenario& scenario, const RunnerConfig& cfg,
                       uint64_t seed) {
  auto sets = primitive_sets_for(scenario, cfg);
  PlannerConfig pc = cfg.planner_cfg;
  pc.seed = seed;
  if (cfg.planner == "dbpibt") return plan_dbpibt(scenario, std::move(sets), pc);
  if (cfg.planner != "dblacam")
    throw std::invalid_argument("unknown planner: " + cfg.planner);
  if (cfg.incremental)
    return plan_incremental(scenario, std::move(sets), pc, cfg.grow);
  return plan_dblacam(scenario, std::move(sets), pc);
}

std::map<std::string, std::string> config_snapshot(const Scenario& scenario,
                                                   const RunnerConfig& cfg,
                                                   uint64_t seed) {
  std::map<std::string, std::string> c;
  const PlannerConfig& p = cfg.planner_cfg;
  c["planner"] = cfg.planner;
  c["incremental"] = cfg.incremental ? "true" : "false";
  c["seed"] = std::to_string(seed);
  c["delta"] = format_double(scenario.delta);
  c["alpha"] = format_double(scenario.alpha);
  c["delta_g"] = format_double(scenario.delta_g);
  c["cluster"] = p.cluster.method == ClusterMethod::None    ? "none"
                 : p.cluster.method == ClusterMethod::Goc   ? "goc"
                                                            : "scgoc";
  c["selection"] = p.cluster.selection == SelectionRule::Vanilla ? "vanilla"
                   : p.cluster.selection == SelectionRule::Deterministic
                       ? "det"
                       : "weighted";
  c["n"] = std::to_string(p.cluster.n);
  c["rho"] = format_double(p.cluster.rho);
  c["tau"] = format_double(p.cluster.tau);
  c["heuristic"] =
      p.heuristic_mode == HeuristicMode::Hest ? "hest" : "reverse-grid-only";
  c["nn_threshold"] = format_double(p.nn_threshold);
  c["est_budget"] = std::to_string(p.est_budget);
  c["grid_resolution"] = format_double(p.grid_resolution);
  c["margin"] = format_double(p.margin);
  c["timelimit"] = format_double(p.time_limit_s);
  c["livelock"] = p.livelock ? "on" : "off";
  c["livelock_window"] = std::to_string(p.livelock_window);
  c["livelock_alternations"] = std::to_string(p.livelock_alternations);
  c["explored_res_linear"] = format_double(
      p.explored_res_linear > 0 ? p.explored_res_linear : scenario.delta / 2.0);
  c["explored_res_angle"] = format_double(p.explored_res_angle);
  c["prim_count"] = std::to_string(cfg.prim_count);
  c["prim_horizon"] = std::to_string(cfg.prim_horizon);
  c["prim_seed"] = std::to_string(cfg.prim_seed);
  int idx = 0;
  std::map<std::string, bool> seen;
  for (const auto& r : scenario.robots) {
    const std::string sig = model_signature(r.model);
    if (seen.emplace(sig, true).second)
      c["model_" + std::to_string(idx++)] = sig;
  }
  return c;
}

namespace {

struct CellResult {
  std::string scenario_name;
  uint64_t seed = 0;
  PlanStatus status = PlanStatus::NoSolution;
  bool valid = false;
  double cost = 0.0;
  long long expansions = 0;
  long long iterations = 0;
  double runtime_s = 0.0;
  StageTimers timers;
  std::string solution_file;
  std::string error;
};

CellResult run_cell(const std::string& scenario_path, uint64_t seed,
                    const RunnerConfig& cfg, const std::string& out_dir) {
  CellResult r;
  r.seed = seed;
  try {
    Scenario scenario = load_scenario(scenario_path);
    check_scenario(scenario);
    r.scenario_name = scenario.name;
    PlanResult res = run_planner(scenario, cfg, seed);
    r.status = res.status;
    r.runtime_s = res.stats.wall_s;
    r.timers = res.stats.timers;
    r.iterations = res.stats.iterations;
    r.expansions = res.stats.iterations;
    if (res.status == PlanStatus::Solved) {
      res.solution.planner = cfg.planner;
      res.solution.scenario_name = scenario.name;
      res.solution.seed = seed;
      res.solution.config = config_snapshot(scenario, cfg, seed);
      const ValidationReport vr = validate(scenario, res.solution);
      r.valid = vr.ok;
      r.cost = res.solution.cost_s;
      fs::create_directories(fs::path(out_dir) / "solutions");
      r.solution_file = (fs::path("solutions") /
                         (scenario.name + "-seed" + std::to_string(seed) +
                          ".solution.json"))
                            .string();
      save_solution(res.solution, (fs::path(out_dir) / r.solution_file).string());
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

BenchOutcome run_bench(const std::vector<std::string>& scenario_paths,
                       const RunnerConfig& cfg,
                       const std::vector<uint64_t>& seeds,
                       const std::string& out_dir, int jobs) {
  fs::create_directories(out_dir);
  std::ofstream report(fs::path(out_dir) / "report.csv");
  std::ofstream timing(fs::path(out_dir) / "timing.csv");
  report << "scenario,seed,planner,status,success,cost_s,expansions,iterations,"
            "valid,solution_file\n";
  timing << "scenario,seed,planner,runtime_s,heuristic_s,collision_unplanned_s,"
            "clustering_s,collision_planned_s,rollout_s,timestamp_unix\n";
  report.flush();
  timing.flush();

  struct Cell {
    std::string path;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& p : scenario_paths)
    for (uint64_t s : seeds) cells.push_back({p, s});

  std::vector<std::optional<CellResult>> results(cells.size());
  std::mutex mtx;
  std::condition_variable cv;
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      CellResult r = run_cell(cells[i].path, cells[i].seed, cfg, out_dir);
      {
        std::lock_guard<std::mutex> lock(mtx);
        results[i] = std::move(r);
      }
      cv.notify_all();
    }
  };

  const int thread_count =
      std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);

  BenchOutcome outcome;
  outcome.cells = static_cast<int>(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    std::unique_lock<std::mutex> lock(mtx);
    cv.wait(lock, [&] { return results[i].has_value(); });
    const CellResult& r = *results[i];
    const bool success = r.status == PlanStatus::Solved;
    report << r.scenario_name << "," << r.seed << "," << cfg.planner << ","
           << (r.error.empty() ? status_name(r.status) : "error") << ","
           << (success ? "1" : "0") << ","
           << (success ? format_double(r.cost) : "") << "," << r.expansions
           << "," << r.iterations << "," << (r.valid ? "1" : "0") << ","
           << r.solution_file << "\n";
    report.flush();
    const double now = std::chrono::duration<double>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    timing << r.scenario_name << "," << r.seed << "," << cfg.planner << ","
           << format_double(r.runtime_s) << ","
           << format_double(r.timers.heuristic_s) << ","
           << format_double(r.timers.collision_unplanned_s) << ","
           << format_double(r.timers.clustering_s) << ","
           << format_double(r.timers.collision_planned_s) << ","
           << format_double(r.timers.rollout_s) << "," << format_double(now)
           << "\n";
    timing.flush();
    if (success) {
      if (r.valid)
        ++outcome.solved;
      else
        ++outcome.validation_failures;
    } else if (r.status == PlanStatus::Timeout && r.error.empty()) {
      ++outcome.timeout_failures;
    } else {
      ++outcome.other_failures;
    }
  }
  for (auto& t : pool) t.join();
  return outcome;
}

}  // namespace dblacam
