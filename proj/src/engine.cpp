#include "airsim/engine.hpp"

#include <algorithm>
#include <string>

#include "airsim/error.hpp"

namespace airsim::engine {

using forecasting::Column;
using game::Action;
using game::Command;

namespace {

constexpr std::uint64_t kWarmupStream = 0x2545f4914f6cdd1dULL;

game::PenaltyMode penalty_mode(Strategy s) {
  switch (s) {
    case Strategy::EgCp:
      return game::PenaltyMode::Cumulative;
    case Strategy::EgNcp:
      return game::PenaltyMode::Instantaneous;
    default:
      return game::PenaltyMode::None;
  }
}

Command command_of(Action a) { return a == Action::Cooperate ? Command::Decrease : Command::Increase; }

}  // namespace

double apply_action(double rate, Command command, double delta, double max_rate) {
  switch (command) {
    case Command::Decrease:
      rate *= 1.0 - delta;
      break;
    case Command::Increase:
      rate *= 1.0 + delta;
      break;
    case Command::Hold:
      break;
  }
  return std::clamp(rate, 0.0, max_rate);
}

std::vector<Source> make_sources(const ScenarioConfig& config, const Grid& grid, Rng& rng) {
  std::vector<Source> sources;
  const Vec3 ext = grid.extent();
  for (Pollutant p : kAllPollutants) {
    for (int i = 0; i < config.source_counts[index_of(p)]; ++i) {
      Source s;
      s.id = static_cast<std::uint32_t>(sources.size());
      s.pollutant = p;
      s.max_rate = config.max_emission_rate;
      s.emission_rate = config.initial_emission_fraction * config.max_emission_rate;
      s.position = {rng.uniform(0.0, ext.x), rng.uniform(0.0, ext.y), 0.0};
      s.stack_height = rng.uniform(config.stack_height_min, config.stack_height_max);
      validate_source(s);
      sources.push_back(s);
    }
  }
  return sources;
}

Simulation::Simulation(const ScenarioConfig& config, Strategy strategy, std::uint64_t seed,
                       const forecasting::ForecastModels& models, const forecasting::TimeSeriesDataset& climate)
    : config_(config),
      strategy_(strategy),
      seed_(seed),
      models_(models),
      climate_(climate),
      grid_(static_cast<std::size_t>(config.box_count)),
      warmup_rng_(seed ^ kWarmupStream) {
  validate_scenario(config_);
  if (!models_.complete()) throw DomainError("forecast models are incomplete; run `airsim train` first");
  if (climate_.rows() < static_cast<std::size_t>(config_.total_hours))
    throw DomainError("climate series shorter than the simulated period");
  for (Pollutant p : kAllPollutants) {
    if (models_.rbf[index_of(p)]->horizon != config_.prediction_horizon)
      throw DomainError("model horizon differs from the scenario prediction horizon");
  }

  Rng layout(seed);
  world_.sources = make_sources(config_, grid_, layout);
  grid_.assign(world_.sources);
  world_.env.wind_direction = config_.wind_direction;
  world_.env.wind_speed = config_.initial_wind_speed;
  world_.env.temperature = config_.initial_temperature;
  world_.env.humidity = config_.initial_humidity;
  world_.env.rainfall = config_.initial_rainfall;
  world_.env.concentrations.assign(grid_.size(), config_.initial_concentrations);
  world_.env.aq_index = config_.initial_aq_index;
  world_.mean_forecast = config_.initial_concentrations;
  world_.commands.assign(world_.sources.size(), Command::Hold);
  cache_.emplace(world_.sources, grid_, config_.wind_direction);

  for (Pollutant p : kAllPollutants) goals_.levels[index_of(p)] = config_.goal_levels[index_of(p)];
  goals_.aq_index = config_.goal_aq_index;

  if (is_evolutionary(strategy_)) {
    const double defect = 1.0 - config_.initial_cooperator_proportion;
    std::vector<game::AgentSpec> specs;
    for (const auto& s : world_.sources) {
      specs.push_back({s.id, s.pollutant, static_cast<std::uint32_t>(grid_.box_of(s.position)),
                       warmup_rng_.bernoulli(defect) ? Action::Defect : Action::Cooperate});
    }
    population_.emplace(specs, config_.payoff_b, config_.payoff_c, static_cast<std::size_t>(config_.memory_steps),
                        penalty_mode(strategy_));
  }
}

std::vector<Command> Simulation::choose_commands() const {
  const std::size_t n = world_.sources.size();
  std::vector<Command> out(n, Command::Increase);
  if (population_) {
    for (const auto& a : population_->agents()) out[a.id] = command_of(a.action);
  } else if (strategy_ == Strategy::Cs) {
    const auto orders = game::central_directive(world_.mean_forecast, world_.env.aq_index, goals_);
    for (std::size_t i = 0; i < n; ++i) out[i] = orders[index_of(world_.sources[i].pollutant)];
  }
  return out;
}

std::vector<std::optional<double>> Simulation::participations(
    const std::vector<PerPollutant<double>>& forecasts) const {
  std::vector<std::optional<double>> sigma(world_.sources.size());
  for (std::size_t b = 0; b < grid_.size(); ++b) {
    for (Pollutant p : kAllPollutants) {
      const auto& goal = goals_.levels[index_of(p)];
      const double level = forecasts[b][index_of(p)];
      if (!goal || !(level > *goal)) continue;
      for (Pollutant g : game::responsible_groups(p)) {
        for (auto id : grid_.boxes()[b].member_sources) {
          const auto& s = world_.sources[id];
          if (s.pollutant != g) continue;
          const double v = game::participation(s.emission_rate, level, *goal);
          sigma[id] = sigma[id] ? std::max(*sigma[id], v) : v;
        }
      }
    }
  }
  return sigma;
}

StepRecord Simulation::step() {
  if (done()) throw DomainError("simulation already finished");
  const int t = world_.step;
  try {
    // (1)-(2) actions and emission rates
    world_.commands = choose_commands();
    for (std::size_t i = 0; i < world_.sources.size(); ++i) {
      auto& s = world_.sources[i];
      s.emission_rate = apply_action(s.emission_rate, world_.commands[i], config_.action_step_fraction, s.max_rate);
    }

    // (3) dispersion under this step's climate
    const auto row = static_cast<std::size_t>(t) * static_cast<std::size_t>(config_.step_hours);
    auto& env = world_.env;
    env.step = t + 1;
    env.wind_speed = climate_.column(Column::WindSpeed)[row];
    env.temperature = climate_.column(Column::Temperature)[row];
    env.humidity = climate_.column(Column::Humidity)[row];
    env.rainfall = climate_.column(Column::Rainfall)[row];
    const auto field = cache_->evaluate(world_.sources, env.wind_speed);

    // (4) forecasts per box, then the index from the box means
    std::vector<PerPollutant<double>> forecasts(grid_.size());
    std::vector<double> features;
    for (std::size_t b = 0; b < grid_.size(); ++b) {
      for (Pollutant p : kAllPollutants) {
        const auto& model = *models_.rbf[index_of(p)];
        features.clear();
        for (Column c : model.inputs) {
          switch (c) {
            case Column::WindSpeed:
              features.push_back(env.wind_speed);
              break;
            case Column::Temperature:
              features.push_back(env.temperature);
              break;
            case Column::Humidity:
              features.push_back(env.humidity);
              break;
            case Column::Rainfall:
              features.push_back(env.rainfall);
              break;
            default:
              features.push_back(field[b][index_of(c) - index_of(Column::PM10)]);
          }
        }
        forecasts[b][index_of(p)] = forecasting::predict_pollutant(model, features);
      }
    }
    PerPollutant<double> mean{};
    for (const auto& f : forecasts)
      for (std::size_t p = 0; p < kPollutantCount; ++p) mean[p] += f[p];
    for (auto& m : mean) m /= static_cast<double>(std::max<std::size_t>(1, forecasts.size()));
    for (std::size_t b = 0; b < grid_.size(); ++b) {
      auto& box = grid_.boxes()[b];
      box.concentrations = forecasts[b];
      box.aq_index = forecasting::predict_air_quality(*models_.mlp, forecasts[b]);
    }
    env.aq_index = forecasting::predict_air_quality(*models_.mlp, mean);
    world_.mean_forecast = mean;
    for (Pollutant p : kAllPollutants) {
      const auto& goal = goals_.levels[index_of(p)];
      world_.exceeded[index_of(p)] = std::any_of(forecasts.begin(), forecasts.end(), [&](const auto& f) {
        return goal && f[index_of(p)] > *goal;
      });
    }

    // (5)-(6) penalties, rewards and learning
    if (population_) {
      const auto sigma = penalty_mode(strategy_) == game::PenaltyMode::None
                             ? std::vector<std::optional<double>>(world_.sources.size())
                             : participations(forecasts);
      const double defect = 1.0 - config_.initial_cooperator_proportion;
      population_->resolve(sigma, [&](const game::AgentState&) {
        return warmup_rng_.bernoulli(defect) ? Action::Defect : Action::Cooperate;
      });
    }
    env.concentrations = std::move(forecasts);
  } catch (const DomainError& e) {
    throw DomainError("step " + std::to_string(t + 1) + ": " + e.what());
  }

  // (7) commit
  world_.step = t + 1;
  StepRecord rec;
  rec.step = world_.step;
  rec.hour = world_.step * config_.step_hours;
  rec.aq_index = world_.env.aq_index;
  rec.concentrations = world_.mean_forecast;
  PerPollutant<std::size_t> coop{}, total{};
  for (std::size_t i = 0; i < world_.sources.size(); ++i) {
    const auto g = index_of(world_.sources[i].pollutant);
    ++total[g];
    if (world_.commands[i] != Command::Increase) ++coop[g];
  }
  std::size_t all_coop = 0, all = 0;
  for (std::size_t g = 0; g < kPollutantCount; ++g) {
    rec.coop[g] = total[g] ? static_cast<double>(coop[g]) / static_cast<double>(total[g]) : 0.0;
    all_coop += coop[g];
    all += total[g];
  }
  rec.coop_all = all ? static_cast<double>(all_coop) / static_cast<double>(all) : 0.0;
  return rec;
}

Trajectory Simulation::run() {
  Trajectory tr;
  tr.strategy = strategy_;
  tr.seed = seed_;
  tr.initial_aq_index = config_.initial_aq_index;
  tr.steps.reserve(static_cast<std::size_t>(config_.total_steps()));
  while (!done()) tr.steps.push_back(step());
  tr.cumulative_reward.assign(world_.sources.size(), 0.0);
  if (population_) {
    for (const auto& a : population_->agents()) tr.cumulative_reward[a.id] = a.cumulative_reward;
  }
  return tr;
}

Trajectory run(const ScenarioConfig& config, Strategy strategy, std::uint64_t seed,
               const forecasting::ForecastModels& models, const forecasting::TimeSeriesDataset& climate) {
  Simulation sim(config, strategy, seed, models, climate);
  return sim.run();
}

}  // namespace airsim::engine
