#pragma once

// File formats written by the command-line tool: trajectory and metrics CSVs,
// the run manifest, and static SVG line charts rendered from the CSVs.

#include <string>
#include <string_view>
#include <vector>

#include "airsim/engine.hpp"

namespace airsim::output {

inline constexpr std::string_view kTrajectoryHeader =
    "step,hour,aq_index,pm10,sox,nox,co,o3,coop_all,coop_pm10,coop_sox,coop_nox,coop_co";

std::string trajectory_csv(const engine::Trajectory& trajectory);

// Step-wise mean of several trajectories, same columns as a trajectory.
// Throws DomainError when the trajectories differ in length.
std::string mean_series_csv(const std::vector<engine::Trajectory>& runs);

inline constexpr std::string_view kMetricsHeader =
    "strategy,seed,final_aq_index,mean_aq_index,aq_1,aq_2,aq_3,aq_4,aq_5,equilibrium_step,"
    "equilibrium_cooperation,final_cooperation,improvements,first_improvement,mean_pm10,mean_sox,mean_nox,"
    "mean_co,mean_o3";

std::string metrics_row(Strategy strategy, std::uint64_t seed, const engine::Metrics& m);

// Numeric table parsed from CSV text with a header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Throws ValidationError when the column is absent.
  std::size_t index(std::string_view column) const;
  std::vector<double> numbers(std::string_view column) const;
};
Table parse_table(std::string_view csv, std::string_view origin = "<csv>");

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       const std::vector<Series>& series);

// The three per-strategy charts, rendered from a series CSV.
std::string aq_chart(const Table& series);
std::string concentration_chart(const Table& series);
std::string cooperation_chart(const Table& series);

}  // namespace airsim::output
