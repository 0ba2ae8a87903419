#pragma once

// The simulation loop: actions, emission rates, dispersion, forecasting,
// penalties and learning, one step of `step_hours` at a time.

#include <array>
#include <optional>
#include <vector>

#include "airsim/core.hpp"
#include "airsim/dispersion.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/game.hpp"
#include "airsim/random.hpp"

namespace airsim::engine {

struct StepRecord {
  int step = 0;  // 1-based
  int hour = 0;  // simulated hours elapsed
  int aq_index = 1;
  PerPollutant<double> concentrations{};  // box-mean forecasts, µg/m³
  double coop_all = 0.0;
  PerPollutant<double> coop{};  // per emitting group; O3 unused
};

struct Trajectory {
  Strategy strategy = Strategy::EgCp;
  std::uint64_t seed = 0;
  int initial_aq_index = 1;
  std::vector<StepRecord> steps;
  std::vector<double> cumulative_reward;  // per agent, zero when rewards are not computed
};

// Multiplies the rate by (1 - delta) or (1 + delta) and clamps to [0, max].
double apply_action(double rate, game::Command command, double delta, double max_rate);

struct WorldState {
  EnvState env;
  std::vector<Source> sources;
  std::vector<game::Command> commands;  // last applied, one per source
  PerPollutant<double> mean_forecast{};
  PerPollutant<bool> exceeded{};
  int step = 0;
};

class Simulation {
 public:
  // `climate` supplies ws/t/hu/rf by hour and must cover total_hours.
  Simulation(const ScenarioConfig& config, Strategy strategy, std::uint64_t seed,
             const forecasting::ForecastModels& models, const forecasting::TimeSeriesDataset& climate);

  const WorldState& state() const { return world_; }
  const Grid& grid() const { return grid_; }
  const std::optional<game::Population>& population() const { return population_; }
  bool done() const { return world_.step >= config_.total_steps(); }

  // Advances one step and returns its summary. Throws DomainError once done.
  StepRecord step();
  Trajectory run();

 private:
  std::vector<game::Command> choose_commands() const;
  std::vector<std::optional<double>> participations(const std::vector<PerPollutant<double>>& forecasts) const;

  ScenarioConfig config_;
  Strategy strategy_;
  std::uint64_t seed_;
  const forecasting::ForecastModels& models_;
  const forecasting::TimeSeriesDataset& climate_;
  Grid grid_;
  WorldState world_;
  std::optional<dispersion::PlumeCache> cache_;
  std::optional<game::Population> population_;
  Rng warmup_rng_;
  game::Goals goals_;
};

// Seeded source layout: positions uniform over the strip, stack heights
// uniform in the configured range, rates at the initial fraction of max.
std::vector<Source> make_sources(const ScenarioConfig& config, const Grid& grid, Rng& rng);

Trajectory run(const ScenarioConfig& config, Strategy strategy, std::uint64_t seed,
               const forecasting::ForecastModels& models, const forecasting::TimeSeriesDataset& climate);

// --- metrics ------------------------------------------------------------------

inline constexpr int kEquilibriumWindow = 100;
inline constexpr double kEquilibriumBand = 0.05;

struct Metrics {
  std::array<int, 5> aq_histogram{};  // occurrences of index 1..5
  int final_aq_index = 1;
  double mean_aq_index = 0.0;
  std::optional<int> equilibrium_step;  // 1-based
  double equilibrium_cooperation = 0.0;  // mean over the last window
  double final_cooperation = 0.0;
  int improvements = 0;  // steps where the appreciation of the index rose
  std::optional<int> first_improvement;
  PerPollutant<double> mean_concentrations{};
};

// First index t such that series[t..t+window) stays within ±band of
// series[t].
std::optional<std::size_t> equilibrium_index(std::span<const double> series, std::size_t window = kEquilibriumWindow,
                                             double band = kEquilibriumBand);

// Throws DomainError for an empty trajectory.
Metrics compute_metrics(const Trajectory& trajectory);

}  // namespace airsim::engine
