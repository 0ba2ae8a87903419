#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/text.hpp"

namespace airsim::forecasting {

namespace {
constexpr std::array<std::string_view, kColumnCount> kColumnKeys = {"ws",   "t",   "hu", "rf", "pm10",
                                                                    "sox", "nox", "co", "o3"};
constexpr std::string_view kHeader = "timestamp,ws,t,hu,rf,pm10,sox,nox,co,o3";

bool valid_cell(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace

Column column_of(Pollutant p) { return static_cast<Column>(index_of(Column::PM10) + airsim::index_of(p)); }

std::string_view key_of(Column c) { return kColumnKeys[index_of(c)]; }

ColumnRange TimeSeriesDataset::range(Column c) const {
  const auto& v = column(c);
  if (v.empty()) throw DomainError("range of an empty column");
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

void TimeSeriesDataset::check() const {
  const std::size_t n = timestamps.size();
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (columns[c].size() != n || imputed[c].size() != n)
      throw ValidationError(std::string(kColumnKeys[c]), "column length differs from timestamp count");
    for (double v : columns[c]) {
      if (!valid_cell(v)) throw ValidationError(std::string(kColumnKeys[c]), "gap left after imputation");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (timestamps[i] <= timestamps[i - 1]) throw ValidationError("timestamp", "timestamps must increase");
    if (timestamps[i] - timestamps[i - 1] != timestamps[1] - timestamps[0])
      throw ValidationError("timestamp", "timestamps must be equally spaced");
  }
}

std::vector<double> normalize(std::span<const double> series) {
  if (series.empty()) throw DomainError("cannot normalize an empty series");
  auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw DomainError("degenerate range: series is constant");
  std::vector<double> out(series.size());
  std::transform(series.begin(), series.end(), out.begin(), [range](double v) { return v / range; });
  return out;
}

std::vector<double> denormalize(std::span<const double> normalized, double range) {
  std::vector<double> out(normalized.size());
  std::transform(normalized.begin(), normalized.end(), out.begin(), [range](double v) { return v * range; });
  return out;
}

ImputeResult impute(std::span<const double> series, int window) {
  if (window < 1) throw DomainError("imputation window must be >= 1");
  const std::size_t n = series.size();
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < n; ++i) {
    if (valid_cell(series[i])) valid.push_back(i);
  }
  if (valid.empty()) throw DomainError("series has no valid value to impute from");

  ImputeResult out{std::vector<double>(series.begin(), series.end()), std::vector<bool>(n, false)};
  const auto q = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < n; ++i) {
    if (valid_cell(series[i])) continue;
    // Nearest valid neighbours on each side, taken from the original series.
    auto after = std::lower_bound(valid.begin(), valid.end(), i);
    double sum = 0.0;
    std::size_t count = 0;
    for (auto it = after; it != valid.begin() && count < q;) {
      --it;
      sum += series[*it];
      ++count;
    }
    std::size_t taken = 0;
    for (auto it = after; it != valid.end() && taken < q; ++it, ++taken) sum += series[*it];
    out.values[i] = sum / static_cast<double>(count + taken);
    out.imputed[i] = true;
  }
  return out;
}

double rmse(std::span<const double> predicted, std::span<const double> reference) {
  if (predicted.size() != reference.size()) throw DomainError("rmse: vector lengths differ");
  if (predicted.empty()) throw DomainError("rmse: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - reference[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

// --- CSV ---------------------------------------------------------------------

std::string to_csv(const TimeSeriesDataset& data) {
  std::string out(kHeader);
  out += '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out += std::to_string(data.timestamps[r]);
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      out += ',';
      out += text::format_double(data.columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

TimeSeriesDataset parse_csv(std::string_view content, int impute_window, std::string_view origin) {
  auto lines = text::split(content, '\n');
  if (lines.empty() || text::trim(lines[0]) != kHeader)
    throw ValidationError(std::string(origin) + ":1", "expected header '" + std::string(kHeader) + "'");

  TimeSeriesDataset data;
  std::array<std::vector<double>, kColumnCount> raw;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto line = text::trim(lines[ln]);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(ln + 1);
    auto cells = text::split(line, ',');
    if (cells.size() != kColumnCount + 1)
      throw ValidationError(where, "expected " + std::to_string(kColumnCount + 1) + " cells, got " +
                                       std::to_string(cells.size()));
    auto ts = text::parse_int(cells[0]);
    if (!ts) throw ValidationError(where, "bad timestamp '" + std::string(cells[0]) + "'");
    data.timestamps.push_back(*ts);
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      const auto cell = text::trim(cells[c + 1]);
      if (cell.empty()) {
        raw[c].push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      auto v = text::parse_double(cell);
      if (!v || !std::isfinite(*v))
        throw ValidationError(where, "bad value '" + std::string(cell) + "' in column " + std::string(kColumnKeys[c]));
      raw[c].push_back(*v);
    }
  }
  if (data.timestamps.empty()) throw ValidationError(std::string(origin), "dataset has no rows");
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    try {
      auto res = impute(raw[c], impute_window);
      data.columns[c] = std::move(res.values);
      data.imputed[c] = std::move(res.imputed);
    } catch (const DomainError& e) {
      throw ValidationError(std::string(origin) + " column " + std::string(kColumnKeys[c]), e.what());
    }
  }
  data.check();
  return data;
}

TimeSeriesDataset load_csv(const std::string& path, int impute_window) {
  return parse_csv(text::read_file(path), impute_window, path);
}

void save_csv(const TimeSeriesDataset& data, const std::string& path) { text::write_file(path, to_csv(data)); }

}  // namespace airsim::forecasting
