#pragma once

// Small trained models and a short scenario shared by the engine and output tests.

#include "airsim/core.hpp"
#include "airsim/forecasting.hpp"

namespace airsim::testing {

inline ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.source_counts = {4, 4, 4, 4, 0};
  c.box_count = 4;
  c.total_hours = 240;
  c.dataset_hours = 2000;
  c.max_centers = 10;
  return c;
}

inline const forecasting::TimeSeriesDataset& small_climate() {
  static const auto data = forecasting::synthesize_dataset(forecasting::regional_stats(), 2000, 2003);
  return data;
}

inline const forecasting::ForecastModels& small_models() {
  static const auto models = [] {
    forecasting::ForecastModels m;
    forecasting::RbfOptions ro;
    ro.max_centers = 10;
    for (Pollutant p : kAllPollutants) {
      auto fit = forecasting::train_rbf(small_climate(), p, 2, ro);
      m.rbf[index_of(p)] = fit.model;
      m.reports.push_back(fit.report);
    }
    forecasting::MlpOptions mo;
    mo.samples = 600;
    mo.max_epochs = 300;
    auto fit = forecasting::train_mlp(mo);
    m.mlp = fit.model;
    m.mlp_training_mse = fit.training_mse;
    m.mlp_heldout_accuracy = fit.heldout_accuracy;
    return m;
  }();
  return models;
}

}  // namespace airsim::testing
