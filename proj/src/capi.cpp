#include "airsim/airsim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "airsim/commands.hpp"
#include "airsim/engine.hpp"
#include "airsim/error.hpp"
#include "airsim/output.hpp"

using namespace airsim;

struct airsim_scenario {
  ScenarioConfig config;
};

struct airsim_dataset {
  forecasting::TimeSeriesDataset data;
};

struct airsim_models {
  forecasting::ForecastModels models;
};

struct airsim_sim {
  ScenarioConfig config;
  forecasting::ForecastModels models;
  forecasting::TimeSeriesDataset data;
  std::unique_ptr<engine::Simulation> sim;
  engine::Trajectory trajectory;
};

namespace {

thread_local std::string g_error;

airsim_status fail(airsim_status s, const std::string& message) {
  g_error = message;
  return s;
}

template <typename F>
airsim_status guard(F&& f) {
  try {
    g_error.clear();
    f();
    return AIRSIM_OK;
  } catch (const ValidationError& e) {
    return fail(AIRSIM_ERR_VALIDATION, e.what());
  } catch (const IoError& e) {
    return fail(AIRSIM_ERR_IO, e.what());
  } catch (const TrainingError& e) {
    return fail(AIRSIM_ERR_TRAINING, e.what());
  } catch (const DomainError& e) {
    return fail(AIRSIM_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AIRSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AIRSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(AIRSIM_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string opt(const char* s) { return s ? s : ""; }

commands::Log logger(airsim_log_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& line) { fn(line.c_str(), user); };
}

}  // namespace

#define AIRSIM_REQUIRE(p)                                                        \
  do {                                                                           \
    if (!(p)) return fail(AIRSIM_ERR_ARGUMENT, #p " must not be null");          \
  } while (0)

extern "C" {

const char* airsim_version(void) { return AIRSIM_VERSION; }

const char* airsim_last_error(void) { return g_error.c_str(); }

const char* airsim_status_name(airsim_status status) {
  switch (status) {
    case AIRSIM_OK:
      return "ok";
    case AIRSIM_ERR_ARGUMENT:
      return "argument error";
    case AIRSIM_ERR_VALIDATION:
      return "validation error";
    case AIRSIM_ERR_IO:
      return "I/O error";
    case AIRSIM_ERR_TRAINING:
      return "training error";
    case AIRSIM_ERR_DOMAIN:
      return "domain error";
    case AIRSIM_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void airsim_free_string(char* s) { std::free(s); }

// --- scenario ---

airsim_status airsim_scenario_default(airsim_scenario** out) {
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = new airsim_scenario{commands::scenario_or_default("")}; });
}

airsim_status airsim_scenario_load(const char* path, airsim_scenario** out) {
  AIRSIM_REQUIRE(path);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = new airsim_scenario{load_scenario(path)}; });
}

airsim_status airsim_scenario_parse(const char* text, airsim_scenario** out) {
  AIRSIM_REQUIRE(text);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = new airsim_scenario{validate_scenario(parse_key_values(text))}; });
}

airsim_status airsim_scenario_to_text(const airsim_scenario* s, char** out) {
  AIRSIM_REQUIRE(s);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = copy_string(to_text(s->config)); });
}

airsim_status airsim_scenario_total_steps(const airsim_scenario* s, int* out) {
  AIRSIM_REQUIRE(s);
  AIRSIM_REQUIRE(out);
  *out = s->config.total_steps();
  return AIRSIM_OK;
}

void airsim_scenario_free(airsim_scenario* s) { delete s; }

// --- dataset ---

airsim_status airsim_dataset_synthesize(size_t hours, uint64_t seed, airsim_dataset** out) {
  AIRSIM_REQUIRE(out);
  return guard([&] {
    *out = new airsim_dataset{forecasting::synthesize_dataset(forecasting::regional_stats(), hours, seed)};
  });
}

airsim_status airsim_dataset_load(const char* path, int impute_window, airsim_dataset** out) {
  AIRSIM_REQUIRE(path);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = new airsim_dataset{forecasting::load_csv(path, impute_window)}; });
}

airsim_status airsim_dataset_save(const airsim_dataset* d, const char* path) {
  AIRSIM_REQUIRE(d);
  AIRSIM_REQUIRE(path);
  return guard([&] { forecasting::save_csv(d->data, path); });
}

airsim_status airsim_dataset_rows(const airsim_dataset* d, size_t* out) {
  AIRSIM_REQUIRE(d);
  AIRSIM_REQUIRE(out);
  *out = d->data.rows();
  return AIRSIM_OK;
}

void airsim_dataset_free(airsim_dataset* d) { delete d; }

// --- models ---

airsim_status airsim_models_train(const airsim_dataset* d, int horizon, int max_centers, airsim_models** out) {
  AIRSIM_REQUIRE(d);
  AIRSIM_REQUIRE(out);
  if (max_centers < 1) return fail(AIRSIM_ERR_ARGUMENT, "max_centers must be >= 1");
  return guard([&] {
    auto m = std::make_unique<airsim_models>();
    forecasting::RbfOptions o;
    o.max_centers = static_cast<std::size_t>(max_centers);
    for (Pollutant p : kAllPollutants) {
      auto fit = forecasting::train_rbf(d->data, p, horizon, o);
      m->models.rbf[index_of(p)] = std::move(fit.model);
      m->models.reports.push_back(fit.report);
    }
    auto mlp = forecasting::train_mlp();
    m->models.mlp = mlp.model;
    m->models.mlp_training_mse = mlp.training_mse;
    m->models.mlp_heldout_accuracy = mlp.heldout_accuracy;
    *out = m.release();
  });
}

airsim_status airsim_models_load(const char* dir, airsim_models** out) {
  AIRSIM_REQUIRE(dir);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = new airsim_models{forecasting::load_models(dir)}; });
}

airsim_status airsim_models_save(const airsim_models* m, const char* dir) {
  AIRSIM_REQUIRE(m);
  AIRSIM_REQUIRE(dir);
  return guard([&] { forecasting::save_models(m->models, dir); });
}

airsim_status airsim_models_air_quality(const airsim_models* m, const double forecasts[5], int* out) {
  AIRSIM_REQUIRE(m);
  AIRSIM_REQUIRE(forecasts);
  AIRSIM_REQUIRE(out);
  if (!m->models.mlp) return fail(AIRSIM_ERR_ARGUMENT, "models have no classifier");
  return guard([&] {
    PerPollutant<double> f{};
    for (std::size_t i = 0; i < kPollutantCount; ++i) f[i] = forecasts[i];
    *out = forecasting::predict_air_quality(*m->models.mlp, f);
  });
}

void airsim_models_free(airsim_models* m) { delete m; }

// --- simulation ---

airsim_status airsim_sim_create(const airsim_scenario* s, const char* strategy, uint64_t seed,
                                const airsim_models* m, const airsim_dataset* d, airsim_sim** out) {
  AIRSIM_REQUIRE(s);
  AIRSIM_REQUIRE(strategy);
  AIRSIM_REQUIRE(m);
  AIRSIM_REQUIRE(d);
  AIRSIM_REQUIRE(out);
  return guard([&] {
    const auto st = strategy_from_name(strategy);
    if (!st) throw ValidationError("strategy", std::string("unknown strategy '") + strategy + "'");
    auto h = std::make_unique<airsim_sim>();
    h->config = s->config;
    h->models = m->models;
    h->data = d->data;
    h->sim = std::make_unique<engine::Simulation>(h->config, *st, seed, h->models, h->data);
    h->trajectory.strategy = *st;
    h->trajectory.seed = seed;
    h->trajectory.initial_aq_index = h->config.initial_aq_index;
    *out = h.release();
  });
}

airsim_status airsim_sim_step(airsim_sim* sim, int* done) {
  AIRSIM_REQUIRE(sim);
  return guard([&] {
    if (!sim->sim->done()) sim->trajectory.steps.push_back(sim->sim->step());
    if (done) *done = sim->sim->done() ? 1 : 0;
  });
}

airsim_status airsim_sim_run(airsim_sim* sim) {
  AIRSIM_REQUIRE(sim);
  return guard([&] {
    while (!sim->sim->done()) sim->trajectory.steps.push_back(sim->sim->step());
  });
}

airsim_status airsim_sim_steps_taken(const airsim_sim* sim, size_t* out) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  *out = sim->trajectory.steps.size();
  return AIRSIM_OK;
}

airsim_status airsim_sim_aq_index(const airsim_sim* sim, int* out) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  *out = sim->sim->state().env.aq_index;
  return AIRSIM_OK;
}

airsim_status airsim_sim_cooperation(const airsim_sim* sim, double* out) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  if (sim->trajectory.steps.empty()) return fail(AIRSIM_ERR_DOMAIN, "no step taken yet");
  *out = sim->trajectory.steps.back().coop_all;
  return AIRSIM_OK;
}

airsim_status airsim_sim_concentrations(const airsim_sim* sim, double out[5]) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  const auto& c = sim->sim->state().mean_forecast;
  for (std::size_t i = 0; i < kPollutantCount; ++i) out[i] = c[i];
  return AIRSIM_OK;
}

airsim_status airsim_sim_trajectory_csv(const airsim_sim* sim, char** out) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  return guard([&] { *out = copy_string(output::trajectory_csv(sim->trajectory)); });
}

airsim_status airsim_sim_metrics_csv(const airsim_sim* sim, char** out) {
  AIRSIM_REQUIRE(sim);
  AIRSIM_REQUIRE(out);
  return guard([&] {
    const auto m = engine::compute_metrics(sim->trajectory);
    *out = copy_string(std::string(output::kMetricsHeader) + "\n" +
                       output::metrics_row(sim->trajectory.strategy, sim->trajectory.seed, m));
  });
}

void airsim_sim_free(airsim_sim* sim) { delete sim; }

// --- tool verbs ---

airsim_status airsim_cmd_synth(size_t hours, uint64_t seed, const char* out_path) {
  AIRSIM_REQUIRE(out_path);
  return guard([&] { commands::synth({hours, seed, out_path}); });
}

airsim_status airsim_cmd_train(const airsim_train_options* o) {
  AIRSIM_REQUIRE(o);
  return guard([&] {
    commands::TrainOptions t;
    t.scenario = opt(o->scenario);
    t.dataset = opt(o->dataset);
    if (o->models) t.models = o->models;
    t.log = logger(o->log, o->log_user);
    commands::train(t);
  });
}

airsim_status airsim_cmd_run(const airsim_run_options* o) {
  AIRSIM_REQUIRE(o);
  return guard([&] {
    commands::RunOptions r;
    r.scenario = opt(o->scenario);
    if (o->strategy) r.strategy = o->strategy;
    if (o->seeds) r.seeds = o->seeds;
    if (o->out) r.out = o->out;
    if (o->models) r.models = o->models;
    r.dataset = opt(o->dataset);
    r.train_first = o->train_first != 0;
    r.log = logger(o->log, o->log_user);
    commands::run(r);
  });
}

airsim_status airsim_cmd_compare(const char* const* dirs, size_t count, char** table) {
  AIRSIM_REQUIRE(table);
  if (count > 0 && !dirs) return fail(AIRSIM_ERR_ARGUMENT, "dirs must not be null");
  return guard([&] {
    std::vector<std::string> d;
    for (size_t i = 0; i < count; ++i) {
      if (!dirs[i]) throw ValidationError("dirs", "null directory entry");
      d.emplace_back(dirs[i]);
    }
    *table = copy_string(commands::compare(d));
  });
}

}  // extern "C"
