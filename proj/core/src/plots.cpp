#include "dblacam/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

namespace dblacam {

namespace {
namespace fs = std::filesystem;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

void emit_summary(const std::string& report_csv, const std::string& out_csv) {
  std::ifstream in(report_csv);
  if (!in) throw std::runtime_error("cannot open " + report_csv);

  struct Group {
    int runs = 0, failures = 0;
    std::vector<double> costs;
    std::vector<double> runtimes;
  };
  std::map<std::string, Group> groups;

  std::string line;
  std::getline(in, line);  // header
  std::map<std::pair<std::string, std::string>, double> runtime_of;
  {
    const fs::path timing = fs::path(report_csv).parent_path() / "timing.csv";
    std::ifstream tin(timing);
    if (tin) {
      std::string tline;
      std::getline(tin, tline);
      while (std::getline(tin, tline)) {
        const auto f = split_csv(tline);
        if (f.size() >= 4) runtime_of[{f[0], f[1]}] = std::stod(f[3]);
      }
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 10) continue;
    Group& g = groups[f[0]];
    ++g.runs;
    if (f[4] == "1") {
      if (!f[5].empty()) g.costs.push_back(std::stod(f[5]));
    } else {
      ++g.failures;
    }
    if (auto it = runtime_of.find({f[0], f[1]}); it != runtime_of.end())
      g.runtimes.push_back(it->second);
  }

  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write " + out_csv);
  out << "scenario,runs,failure_rate,runtime_mean_s,runtime_median_s,"
         "cost_mean_s,cost_median_s,cost_best_s,cost_mean_normalized\n";
  for (const auto& [name, g] : groups) {
    const double best =
        g.costs.empty() ? 0.0 : *std::min_element(g.costs.begin(), g.costs.end());
    out << name << "," << g.runs << ","
        << fmt(g.runs ? double(g.failures) / g.runs : 0.0) << ","
        << fmt(mean(g.runtimes)) << "," << fmt(median(g.runtimes)) << ","
        << fmt(mean(g.costs)) << "," << fmt(median(g.costs)) << "," << fmt(best)
        << "," << fmt(best > 0.0 ? mean(g.costs) / best : 0.0) << "\n";
  }
}

void write_trajectory_svg(const Scenario& scenario, const Solution& solution,
                          const std::string& path) {
  const Workspace& ws = scenario.workspace;
  const double w = ws.upper.x() - ws.lower.x();
  const double h = ws.upper.y() - ws.lower.y();
  const double scale = 80.0;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * scale
      << "\" height=\"" << h * scale << "\" viewBox=\"" << ws.lower.x() << " "
      << ws.lower.y() << " " << w << " " << h << "\">\n";
  // y axis flipped so +y points up
  out << "<g transform=\"translate(0," << (ws.lower.y() + ws.upper.y())
      << ") scale(1,-1)\">\n";
  out << "<rect x=\"" << ws.lower.x() << "\" y=\"" << ws.lower.y()
      << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"0.02\"/>\n";
  for (const auto& o : ws.obstacles) {
    if (o.kind == Obstacle::Kind::Sphere) {
      out << "<circle cx=\"" << o.center.x() << "\" cy=\"" << o.center.y()
          << "\" r=\"" << o.radius << "\" fill=\"#888888\"/>\n";
    } else {
      out << "<rect x=\"" << o.center.x() - o.half_extents.x() << "\" y=\""
          << o.center.y() - o.half_extents.y() << "\" width=\""
          << 2 * o.half_extents.x() << "\" height=\"" << 2 * o.half_extents.y()
          << "\" fill=\"#888888\" transform=\"rotate("
          << o.yaw * 180.0 / 3.14159265358979323846 << " " << o.center.x()
          << " " << o.center.y() << ")\"/>\n";
    }
  }
  static const char* palette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                  "#ff7f00", "#a65628", "#f781bf", "#17becf"};
  for (size_t i = 0; i < solution.robots.size(); ++i) {
    const auto& t = solution.robots[i];
    const char* color = palette[i % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"0.04\" points=\"";
    for (int k = 0; k < t.states.rows(); ++k)
      out << t.states(k, 0) << "," << t.states(k, 1) << " ";
    out << "\"/>\n";
    const auto& spec = scenario.robots[i];
    const double r = spec.shape.bounding_radius(ws.dim);
    out << "<circle cx=\"" << spec.start[0] << "\" cy=\"" << spec.start[1]
        << "\" r=\"" << r << "\" fill=\"" << color << "\" fill-opacity=\"0.3\""
        << " stroke=\"" << color << "\" stroke-width=\"0.02\"/>\n";
    out << "<circle cx=\"" << spec.goal[0] << "\" cy=\"" << spec.goal[1]
        << "\" r=\"" << 0.5 * r << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"0.03\" stroke-dasharray=\"0.05,0.05\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace dblacam
