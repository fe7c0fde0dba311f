#pragma once

#include <string>

#include "dblacam/scenario.hpp"

namespace dblacam {

/// Groups report.csv rows by scenario into summary.csv (failure rate,
/// runtime and cost mean/median, cost normalized by the per-scenario best).
/// Runtime columns come from timing.csv when present next to the report.
void emit_summary(const std::string& report_csv, const std::string& out_csv);

/// Trajectories over obstacles as a standalone SVG (3D projects to xy).
void write_trajectory_svg(const Scenario& scenario, const Solution& solution,
                          const std::string& path);

}  // namespace dblacam
