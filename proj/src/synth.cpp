#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/random.hpp"

namespace airsim::forecasting {

DatasetStats regional_stats() {
  DatasetStats s{};
  // Annual mean and standard deviation of the first year where reported,
  // otherwise the second; record maxima as the upper clip.
  s[index_of(Column::PM10)] = {51.70, 51.66, 508.0, 0.0};
  s[index_of(Column::NOx)] = {14.50, 25.01, 435.0, 0.0};
  s[index_of(Column::SOx)] = {7.60, 14.78, 190.0, 0.0};
  s[index_of(Column::CO)] = {1.31, 0.52, 12.2, 0.0};
  s[index_of(Column::O3)] = {42.27, 64.58, 688.0, 0.0};
  s[index_of(Column::WindSpeed)] = {2.65, 1.78, 9.6, 0.1};
  s[index_of(Column::Humidity)] = {63.52, 16.50, 93.0, 0.0};
  s[index_of(Column::Temperature)] = {18.96, 7.76, 42.1, 0.0};
  s[index_of(Column::Rainfall)] = {2.96, 9.27, 73.9, 0.0};
  return s;
}

namespace {

constexpr double kHourlyPersistence = 0.95;
constexpr int kPhotochemicalLag = 2;  // hours between precursors and ozone

std::vector<double> ar1(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  const double innovation = std::sqrt(1.0 - kHourlyPersistence * kHourlyPersistence);
  z[0] = rng.normal();
  for (std::size_t t = 1; t < n; ++t) z[t] = kHourlyPersistence * z[t - 1] + innovation * rng.normal();
  return z;
}

std::vector<double> diurnal(std::size_t n, double phase) {
  std::vector<double> d(n);
  for (std::size_t t = 0; t < n; ++t)
    d[t] = std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t % 24) / 24.0 + phase);
  return d;
}

struct Part {
  const std::vector<double>* series;
  double weight;
  int lag = 0;
};

// Weighted mix of unit-variance components, rescaled as if independent. The
// marginal shaping below fixes up any residual variance.
std::vector<double> mix(std::size_t n, std::initializer_list<Part> parts) {
  double norm = 0.0;
  for (const auto& p : parts) norm += p.weight * p.weight;
  norm = std::sqrt(norm);
  std::vector<double> out(n, 0.0);
  for (const auto& p : parts) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t src = t >= static_cast<std::size_t>(p.lag) ? t - p.lag : 0;
      out[t] += p.weight / norm * (*p.series)[src];
    }
  }
  return out;
}

// Maps a standard-normal latent series onto the target marginal: log-normal
// for skewed positive quantities, normal otherwise; then iteratively
// re-standardizes and clips so the sample moments land on the targets.
std::vector<double> shape(const std::vector<double>& latent, const SeriesStats& st, bool skewed) {
  std::vector<double> x(latent.size());
  if (skewed) {
    const double cv = st.stddev / st.mean;
    const double s2 = std::log1p(cv * cv);
    const double mu = std::log(st.mean) - s2 / 2.0;
    const double s = std::sqrt(s2);
    std::transform(latent.begin(), latent.end(), x.begin(), [&](double z) { return std::exp(mu + s * z); });
  } else {
    std::transform(latent.begin(), latent.end(), x.begin(), [&](double z) { return st.mean + st.stddev * z; });
  }
  const double n = static_cast<double>(x.size());
  for (int iter = 0; iter < 25; ++iter) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (n - 1.0));
    if (!(sd > 0.0)) break;
    for (double& v : x) v = std::clamp(st.mean + st.stddev * (v - mean) / sd, st.min, st.max);
  }
  return x;
}

}  // namespace

TimeSeriesDataset synthesize_dataset(const DatasetStats& stats, std::size_t hours, std::uint64_t seed) {
  if (hours < 48) throw DomainError("synthetic dataset needs at least 48 hours");
  Rng rng(seed);
  const std::size_t n = hours;

  // Independent drivers, drawn in a fixed order.
  const auto ws_own = ar1(rng, n);
  const auto t_own = ar1(rng, n);
  const auto hu_own = ar1(rng, n);
  const auto rf_own = ar1(rng, n);
  const auto pm_own = ar1(rng, n);
  const auto sox_own = ar1(rng, n);
  const auto nox_own = ar1(rng, n);
  const auto co_own = ar1(rng, n);
  const auto o3_own = ar1(rng, n);
  const auto day = diurnal(n, -std::numbers::pi / 2.0);  // peaks at noon
  const auto gust = diurnal(n, 0.0);

  const auto ws = mix(n, {{&ws_own, 1.0}, {&gust, 0.45}});
  const auto temp = mix(n, {{&t_own, 1.0}, {&day, 0.8}});
  const auto hum = mix(n, {{&hu_own, 0.8}, {&temp, -0.6}});
  const auto rain = mix(n, {{&rf_own, 1.0}, {&hu_own, 0.5}});
  // Primary pollutants dilute with wind; ozone forms from SOx and CO with a lag
  // and grows with temperature.
  const auto pm = mix(n, {{&pm_own, 0.85}, {&ws, -0.5}});
  const auto sox = mix(n, {{&sox_own, 0.85}, {&ws, -0.5}});
  const auto nox = mix(n, {{&nox_own, 0.85}, {&ws, -0.5}});
  const auto co = mix(n, {{&co_own, 0.85}, {&ws, -0.5}});
  const auto o3 = mix(n, {{&sox, 0.6, kPhotochemicalLag},
                          {&co, 0.6, kPhotochemicalLag},
                          {&temp, 0.3},
                          {&o3_own, 0.25}});

  TimeSeriesDataset data;
  data.timestamps.resize(n);
  std::iota(data.timestamps.begin(), data.timestamps.end(), std::int64_t{0});
  auto put = [&](Column c, const std::vector<double>& latent, bool skewed) {
    data.columns[index_of(c)] = shape(latent, stats[index_of(c)], skewed);
    data.imputed[index_of(c)].assign(n, false);
  };
  put(Column::WindSpeed, ws, true);
  put(Column::Temperature, temp, false);
  put(Column::Humidity, hum, false);
  put(Column::Rainfall, rain, true);
  put(Column::PM10, pm, true);
  put(Column::SOx, sox, true);
  put(Column::NOx, nox, true);
  put(Column::CO, co, true);
  put(Column::O3, o3, true);
  return data;
}

}  // namespace airsim::forecasting
