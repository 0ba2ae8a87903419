#pragma once

// The four tool verbs: synth, train, run and compare.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "airsim/core.hpp"
#include "airsim/forecasting.hpp"

namespace airsim::commands {

using Log = std::function<void(const std::string&)>;

// "1-16", "3", "1,4,9-11". Throws ValidationError on malformed input.
std::vector<std::uint64_t> parse_seeds(std::string_view text);
// A strategy name or "all". Throws ValidationError listing the valid names.
std::vector<Strategy> parse_strategies(std::string_view text);

// Defaults when `path` is empty.
ScenarioConfig scenario_or_default(const std::string& path);

// The dataset named by `path`, or the scenario's synthetic dataset.
forecasting::TimeSeriesDataset dataset_for(const ScenarioConfig& config, const std::string& path);

struct SynthOptions {
  std::size_t hours = 17520;
  std::uint64_t seed = 2003;
  std::string out;
};
void synth(const SynthOptions& options);

struct TrainOptions {
  std::string scenario;  // optional
  std::string dataset;   // optional
  std::string models = "models";
  Log log;
};
// Writes every model that trains; throws TrainingError afterwards if the
// classifier failed.
forecasting::ForecastModels train(const TrainOptions& options);

struct RunOptions {
  std::string scenario;  // optional
  std::string strategy = "all";
  std::string seeds = "1";
  std::string out = "out";
  std::string models = "models";
  std::string dataset;  // optional
  bool train_first = false;
  Log log;
};
void run(const RunOptions& options);

// Ranks the strategies found in the run directories, best first.
// Throws ValidationError for fewer than two directories or mismatched scenarios.
std::string compare(const std::vector<std::string>& dirs);

}  // namespace airsim::commands
