#include <string>

#include "airsim/error.hpp"
#include "airsim/output.hpp"
#include "airsim/text.hpp"

namespace airsim::output {

using text::format_double;

namespace {

void append_row(std::string& out, int step, int hour, double aq, const PerPollutant<double>& conc, double coop_all,
                const PerPollutant<double>& coop) {
  out += std::to_string(step);
  out += ',';
  out += std::to_string(hour);
  out += ',';
  out += format_double(aq);
  for (double c : conc) {
    out += ',';
    out += format_double(c);
  }
  out += ',';
  out += format_double(coop_all);
  for (Pollutant p : kEmittedPollutants) {
    out += ',';
    out += format_double(coop[index_of(p)]);
  }
  out += '\n';
}

}  // namespace

std::string trajectory_csv(const engine::Trajectory& trajectory) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& s : trajectory.steps)
    append_row(out, s.step, s.hour, s.aq_index, s.concentrations, s.coop_all, s.coop);
  return out;
}

std::string mean_series_csv(const std::vector<engine::Trajectory>& runs) {
  if (runs.empty()) throw DomainError("mean series of no runs");
  const std::size_t n = runs.front().steps.size();
  for (const auto& r : runs) {
    if (r.steps.size() != n) throw DomainError("runs differ in length");
  }
  const double k = static_cast<double>(runs.size());
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    double aq = 0.0, coop_all = 0.0;
    PerPollutant<double> conc{}, coop{};
    for (const auto& r : runs) {
      const auto& s = r.steps[i];
      aq += s.aq_index;
      coop_all += s.coop_all;
      for (std::size_t p = 0; p < kPollutantCount; ++p) {
        conc[p] += s.concentrations[p];
        coop[p] += s.coop[p];
      }
    }
    for (std::size_t p = 0; p < kPollutantCount; ++p) {
      conc[p] /= k;
      coop[p] /= k;
    }
    const auto& s0 = runs.front().steps[i];
    append_row(out, s0.step, s0.hour, aq / k, conc, coop_all / k, coop);
  }
  return out;
}

std::string metrics_row(Strategy strategy, std::uint64_t seed, const engine::Metrics& m) {
  std::string out(name_of(strategy));
  auto cell = [&out](const std::string& v) {
    out += ',';
    out += v;
  };
  cell(std::to_string(seed));
  cell(std::to_string(m.final_aq_index));
  cell(format_double(m.mean_aq_index));
  for (int h : m.aq_histogram) cell(std::to_string(h));
  cell(m.equilibrium_step ? std::to_string(*m.equilibrium_step) : "");
  cell(format_double(m.equilibrium_cooperation));
  cell(format_double(m.final_cooperation));
  cell(std::to_string(m.improvements));
  cell(m.first_improvement ? std::to_string(*m.first_improvement) : "");
  for (double c : m.mean_concentrations) cell(format_double(c));
  out += '\n';
  return out;
}

std::size_t Table::index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  throw ValidationError(std::string(column), "column not found");
}

std::vector<double> Table::numbers(std::string_view column) const {
  const std::size_t c = index(column);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto v = text::parse_double(rows[r][c]);
    if (!v) throw ValidationError(std::string(column), "row " + std::to_string(r + 2) + " is not a number");
    out.push_back(*v);
  }
  return out;
}

Table parse_table(std::string_view csv, std::string_view origin) {
  Table t;
  const auto lines = text::split(csv, '\n');
  if (lines.empty() || text::trim(lines[0]).empty()) throw ValidationError(std::string(origin), "missing header");
  for (auto c : text::split(text::trim(lines[0]), ',')) t.columns.emplace_back(text::trim(c));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string> row;
    for (auto c : text::split(line, ',')) row.emplace_back(text::trim(c));
    if (row.size() != t.columns.size())
      throw ValidationError(std::string(origin) + ":" + std::to_string(i + 1), "wrong number of cells");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace airsim::output
