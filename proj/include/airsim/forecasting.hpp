#pragma once

// Time-series preparation and the two-stage neural forecaster: one RBF
// regressor per pollutant followed by an MLP that maps the five pollutant
// forecasts to an air-quality index.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airsim/core.hpp"

namespace airsim::forecasting {

enum class Column : std::uint8_t {
  WindSpeed = 0,
  Temperature,
  Humidity,
  Rainfall,
  PM10,
  SOx,
  NOx,
  CO,
  O3,
};
inline constexpr std::size_t kColumnCount = 9;
inline constexpr std::array<Column, 4> kClimateColumns = {Column::WindSpeed, Column::Temperature, Column::Humidity,
                                                          Column::Rainfall};
constexpr std::size_t index_of(Column c) { return static_cast<std::size_t>(c); }
Column column_of(Pollutant p);
std::string_view key_of(Column c);  // CSV header name

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
  double span() const { return max - min; }
};

// Hourly, gap-free series. `imputed` flags the cells that were filled in.
struct TimeSeriesDataset {
  std::vector<std::int64_t> timestamps;
  std::array<std::vector<double>, kColumnCount> columns;
  std::array<std::vector<bool>, kColumnCount> imputed;

  std::size_t rows() const { return timestamps.size(); }
  const std::vector<double>& column(Column c) const { return columns[index_of(c)]; }
  ColumnRange range(Column c) const;
  // Throws ValidationError on ragged columns, gaps or uneven timestamps.
  void check() const;
};

// Divides every element by (max - min); the minimum is not subtracted.
// Throws DomainError for a constant or empty series.
std::vector<double> normalize(std::span<const double> series);
std::vector<double> denormalize(std::span<const double> normalized, double range);

struct ImputeResult {
  std::vector<double> values;
  std::vector<bool> imputed;
};
// Cells that are NaN or negative are invalid. Each is replaced by the mean of
// up to `window` nearest valid values before it and `window` after it.
// Throws DomainError if no cell is valid or window < 1.
ImputeResult impute(std::span<const double> series, int window);

// Root mean squared error. Throws DomainError on length mismatch or empty input.
double rmse(std::span<const double> predicted, std::span<const double> reference);

// --- synthetic data ------------------------------------------------------------

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  double max = 0.0;
  double min = 0.0;  // lower clip
};
using DatasetStats = std::array<SeriesStats, kColumnCount>;

// Moments of the regional monitoring record used to calibrate synthetic data.
DatasetStats regional_stats();

// Autocorrelated (hourly AR(1) plus a diurnal harmonic) series whose sample
// moments follow `stats`, clipped to [min, max]. Deterministic in `seed`.
// Throws DomainError if hours < 48.
TimeSeriesDataset synthesize_dataset(const DatasetStats& stats, std::size_t hours, std::uint64_t seed);

std::string to_csv(const TimeSeriesDataset& data);
// Parses the dataset CSV, imputing empty or negative cells. Errors name the
// offending line.
TimeSeriesDataset parse_csv(std::string_view content, int impute_window, std::string_view origin = "<csv>");
TimeSeriesDataset load_csv(const std::string& path, int impute_window);
void save_csv(const TimeSeriesDataset& data, const std::string& path);

// --- RBF regressor ---------------------------------------------------------------

// Inputs feeding the regressor for `p`: the four climate columns and the
// pollutant's own concentration; O3 uses SOx and CO instead of itself.
std::vector<Column> rbf_inputs(Pollutant p);

struct RbfModel {
  Pollutant pollutant = Pollutant::PM10;
  int horizon = 2;                   // hours
  std::vector<Column> inputs;
  std::vector<ColumnRange> input_ranges;  // raw units, clamp + scale
  double target_range = 1.0;
  double width = 1.0;
  Eigen::MatrixXd centers;  // one normalized center per row
  Eigen::VectorXd weights;  // one per center
  double bias = 0.0;
  Eigen::VectorXd linear;   // one per input

  std::size_t input_dim() const { return inputs.size(); }
  std::size_t center_count() const { return static_cast<std::size_t>(centers.rows()); }
  // Normalized input vector (clamped to the training range).
  Eigen::VectorXd scale(std::span<const double> features) const;
  // Output in normalized target units, before clamping.
  double raw(const Eigen::VectorXd& scaled) const;
  void check() const;
};

// Forecast at t + horizon in µg/m³, clamped to >= 0. Throws DomainError on a
// feature-dimension mismatch.
double predict_pollutant(const RbfModel& model, std::span<const double> features);

struct RbfReport {
  Pollutant pollutant = Pollutant::PM10;
  std::size_t centers = 0;
  double validation_rmse = 0.0;  // µg/m³
  double baseline_rmse = 0.0;    // persistence, µg/m³
  double training_rmse = 0.0;
};

struct RbfOptions {
  std::size_t max_centers = 40;
  std::size_t max_training_rows = 3000;
  std::size_t max_candidates = 400;
  std::size_t patience = 5;
  double validation_fraction = 0.25;
};

struct RbfFit {
  RbfModel model;
  RbfReport report;
};

// Greedy forward selection of centers by residual reduction, weights by least
// squares, early stop on validation RMSE. Throws DomainError on too little data.
RbfFit train_rbf(const TimeSeriesDataset& data, Pollutant pollutant, int horizon, const RbfOptions& options = {});

// Persistence forecast error on the same validation split train_rbf uses.
double persistence_rmse(const TimeSeriesDataset& data, Pollutant pollutant, int horizon,
                        double validation_fraction = 0.25);

// --- MLP classifier ------------------------------------------------------------

// 5 -> 5 -> 10 -> 1, logistic hidden units, linear output.
class MlpModel {
 public:
  static constexpr std::array<int, 4> kLayers = {5, 5, 10, 1};
  static constexpr std::size_t kParameterCount = 5 * 5 + 5 + 10 * 5 + 10 + 10 + 1;

  MlpModel();
  explicit MlpModel(const Eigen::VectorXd& parameters, double co_scale = 12.2);

  // Inputs in band-ladder coordinates scaled to [0, 1]; CO scaled by co_scale.
  Eigen::Matrix<double, 5, 1> encode(const PerPollutant<double>& concentrations) const;
  double forward(const Eigen::Matrix<double, 5, 1>& x) const;
  // Forward pass plus d(output)/d(parameters).
  double forward(const Eigen::Matrix<double, 5, 1>& x, Eigen::Ref<Eigen::VectorXd> gradient) const;

  const Eigen::VectorXd& parameters() const { return params_; }
  void set_parameters(const Eigen::VectorXd& p);
  double co_scale() const { return co_scale_; }

 private:
  Eigen::VectorXd params_;
  double co_scale_;
};

// Rounded, clamped network output. Throws DomainError for negative inputs.
int predict_air_quality(const MlpModel& model, const PerPollutant<double>& forecasts);

struct LabelledSample {
  PerPollutant<double> concentrations{};
  int label = 1;
};

// Concentration vectors covering every band of every classified pollutant,
// labelled by classify_air_quality. One pollutant sits inside band q with the
// given margin from the band edges, the rest lie at or below band q.
std::vector<LabelledSample> sample_labelled(std::size_t count, std::uint64_t seed, double margin = 0.2);

// Held-out grid: 10 levels per classified pollutant (the 1/4 and 3/4 points
// of each band), 10^4 vectors, CO fixed at zero.
std::vector<LabelledSample> heldout_grid();

struct MlpOptions {
  std::size_t samples = 1500;
  std::uint64_t seed = 7;
  std::size_t max_epochs = 600;
  std::size_t restarts = 8;
  double target_mse = 0.05;
};

struct MlpFit {
  MlpModel model;
  double training_mse = 0.0;
  double heldout_accuracy = 0.0;
  std::size_t epochs = 0;
  std::vector<double> loss_history;  // accepted steps of the winning restart
};

// Levenberg-Marquardt on labels from classify_air_quality. Throws
// TrainingError when no restart reaches target_mse within max_epochs.
MlpFit train_mlp(const MlpOptions& options = {});
MlpFit train_mlp(std::span<const LabelledSample> samples, const MlpOptions& options);

// --- model bundle --------------------------------------------------------------

struct ForecastModels {
  PerPollutant<std::optional<RbfModel>> rbf;
  std::optional<MlpModel> mlp;
  std::vector<RbfReport> reports;
  double mlp_training_mse = 0.0;
  double mlp_heldout_accuracy = 0.0;

  bool complete() const;
};

inline constexpr int kModelFormatVersion = 1;

std::string to_json(const RbfModel& model, const RbfReport* report = nullptr);
std::string to_json(const MlpModel& model, double training_mse, double heldout_accuracy);
RbfModel rbf_from_json(std::string_view json);
MlpModel mlp_from_json(std::string_view json);

// Files: rbf_<pollutant>.json for each pollutant, mlp.json, report.csv.
void save_models(const ForecastModels& models, const std::string& dir);
// Throws IoError naming the first missing file.
ForecastModels load_models(const std::string& dir);
std::vector<std::string> model_file_names();

}  // namespace airsim::forecasting
