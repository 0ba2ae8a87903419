#include <algorithm>
#include <cmath>

#include "airsim/engine.hpp"
#include "airsim/error.hpp"

namespace airsim::engine {

std::optional<std::size_t> equilibrium_index(std::span<const double> series, std::size_t window, double band) {
  if (window == 0 || series.size() < window) return std::nullopt;
  for (std::size_t t = 0; t + window <= series.size(); ++t) {
    const double ref = series[t];
    bool steady = true;
    for (std::size_t j = 1; j < window && steady; ++j) steady = std::abs(series[t + j] - ref) <= band;
    if (steady) return t;
  }
  return std::nullopt;
}

Metrics compute_metrics(const Trajectory& trajectory) {
  const auto& steps = trajectory.steps;
  if (steps.empty()) throw DomainError("metrics of an empty trajectory");
  Metrics m;
  std::vector<double> coop;
  coop.reserve(steps.size());
  int previous = trajectory.initial_aq_index;
  double aq_sum = 0.0;
  for (const auto& s : steps) {
    ++m.aq_histogram[static_cast<std::size_t>(std::clamp(s.aq_index, 1, 5) - 1)];
    aq_sum += s.aq_index;
    coop.push_back(s.coop_all);
    for (std::size_t p = 0; p < kPollutantCount; ++p) m.mean_concentrations[p] += s.concentrations[p];
    if (appreciation(s.aq_index) > appreciation(previous)) {
      ++m.improvements;
      if (!m.first_improvement) m.first_improvement = s.step;
    }
    previous = s.aq_index;
  }
  const double n = static_cast<double>(steps.size());
  for (auto& c : m.mean_concentrations) c /= n;
  m.mean_aq_index = aq_sum / n;
  m.final_aq_index = steps.back().aq_index;
  m.final_cooperation = steps.back().coop_all;
  if (auto eq = equilibrium_index(coop)) m.equilibrium_step = steps[*eq].step;
  const std::size_t tail = std::min<std::size_t>(steps.size(), kEquilibriumWindow);
  double acc = 0.0;
  for (std::size_t i = steps.size() - tail; i < steps.size(); ++i) acc += coop[i];
  m.equilibrium_cooperation = acc / static_cast<double>(tail);
  return m;
}

}  // namespace airsim::engine
