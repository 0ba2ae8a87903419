#ifndef AIRSIM_AIRSIM_H
#define AIRSIM_AIRSIM_H

/* C interface to the air-quality agent simulator. Every call returns a
 * status code; on failure airsim_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AIRSIM_BUILDING_LIBRARY)
#define AIRSIM_API __declspec(dllexport)
#else
#define AIRSIM_API __declspec(dllimport)
#endif
#else
#define AIRSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum airsim_status {
  AIRSIM_OK = 0,
  AIRSIM_ERR_ARGUMENT = 1,   /* null pointer, bad index */
  AIRSIM_ERR_VALIDATION = 2, /* bad scenario, dataset or option value */
  AIRSIM_ERR_IO = 3,
  AIRSIM_ERR_TRAINING = 4, /* a model did not converge */
  AIRSIM_ERR_DOMAIN = 5,   /* numeric precondition violated */
  AIRSIM_ERR_INTERNAL = 6
} airsim_status;

typedef struct airsim_scenario airsim_scenario;
typedef struct airsim_dataset airsim_dataset;
typedef struct airsim_models airsim_models;
typedef struct airsim_sim airsim_sim;

typedef void (*airsim_log_fn)(const char* line, void* user);

AIRSIM_API const char* airsim_version(void);
AIRSIM_API const char* airsim_last_error(void);
AIRSIM_API const char* airsim_status_name(airsim_status status);

/* Strings returned through char** out-parameters are released with this. */
AIRSIM_API void airsim_free_string(char* s);

/* --- scenario --- */
AIRSIM_API airsim_status airsim_scenario_default(airsim_scenario** out);
AIRSIM_API airsim_status airsim_scenario_load(const char* path, airsim_scenario** out);
AIRSIM_API airsim_status airsim_scenario_parse(const char* text, airsim_scenario** out);
AIRSIM_API airsim_status airsim_scenario_to_text(const airsim_scenario* s, char** out);
AIRSIM_API airsim_status airsim_scenario_total_steps(const airsim_scenario* s, int* out);
AIRSIM_API void airsim_scenario_free(airsim_scenario* s);

/* --- dataset --- */
AIRSIM_API airsim_status airsim_dataset_synthesize(size_t hours, uint64_t seed, airsim_dataset** out);
AIRSIM_API airsim_status airsim_dataset_load(const char* path, int impute_window, airsim_dataset** out);
AIRSIM_API airsim_status airsim_dataset_save(const airsim_dataset* d, const char* path);
AIRSIM_API airsim_status airsim_dataset_rows(const airsim_dataset* d, size_t* out);
AIRSIM_API void airsim_dataset_free(airsim_dataset* d);

/* --- forecast models --- */
AIRSIM_API airsim_status airsim_models_train(const airsim_dataset* d, int horizon, int max_centers,
                                             airsim_models** out);
AIRSIM_API airsim_status airsim_models_load(const char* dir, airsim_models** out);
AIRSIM_API airsim_status airsim_models_save(const airsim_models* m, const char* dir);
/* Five forecasts in the order PM10, SOx, NOx, CO, O3. */
AIRSIM_API airsim_status airsim_models_air_quality(const airsim_models* m, const double forecasts[5], int* out);
AIRSIM_API void airsim_models_free(airsim_models* m);

/* --- simulation ---
 * strategy: "eg-cp", "eg-ncp", "eg-np", "cs" or "nc". The simulation keeps
 * its own copies of the scenario, models and dataset. */
AIRSIM_API airsim_status airsim_sim_create(const airsim_scenario* s, const char* strategy, uint64_t seed,
                                           const airsim_models* m, const airsim_dataset* d, airsim_sim** out);
/* Advances one step. Sets *done to 1 once the run is complete; further
 * calls do nothing. */
AIRSIM_API airsim_status airsim_sim_step(airsim_sim* sim, int* done);
AIRSIM_API airsim_status airsim_sim_run(airsim_sim* sim);
AIRSIM_API airsim_status airsim_sim_steps_taken(const airsim_sim* sim, size_t* out);
AIRSIM_API airsim_status airsim_sim_aq_index(const airsim_sim* sim, int* out);
AIRSIM_API airsim_status airsim_sim_cooperation(const airsim_sim* sim, double* out);
/* Box-mean forecasts of the last step, order as in airsim_models_air_quality. */
AIRSIM_API airsim_status airsim_sim_concentrations(const airsim_sim* sim, double out[5]);
AIRSIM_API airsim_status airsim_sim_trajectory_csv(const airsim_sim* sim, char** out);
AIRSIM_API airsim_status airsim_sim_metrics_csv(const airsim_sim* sim, char** out);
AIRSIM_API void airsim_sim_free(airsim_sim* sim);

/* --- tool verbs --- */
AIRSIM_API airsim_status airsim_cmd_synth(size_t hours, uint64_t seed, const char* out_path);

typedef struct airsim_train_options {
  const char* scenario; /* optional */
  const char* dataset;  /* optional; synthetic from the scenario otherwise */
  const char* models;   /* output directory */
  airsim_log_fn log;
  void* log_user;
} airsim_train_options;
AIRSIM_API airsim_status airsim_cmd_train(const airsim_train_options* options);

typedef struct airsim_run_options {
  const char* scenario; /* optional */
  const char* strategy; /* a strategy name or "all" */
  const char* seeds;    /* "1-16", "3", "1,5,7-9" */
  const char* out;
  const char* models;
  const char* dataset; /* optional */
  int train_first;
  airsim_log_fn log;
  void* log_user;
} airsim_run_options;
AIRSIM_API airsim_status airsim_cmd_run(const airsim_run_options* options);

/* Ranking table of the strategies found in `count` run directories. */
AIRSIM_API airsim_status airsim_cmd_compare(const char* const* dirs, size_t count, char** table);

#ifdef __cplusplus
}
#endif

#endif
