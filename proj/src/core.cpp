#include "airsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airsim/error.hpp"

namespace airsim {

namespace {

constexpr std::array<std::string_view, kPollutantCount> kNames = {"PM10", "SOx", "NOx", "CO", "O3"};
constexpr std::array<std::string_view, kPollutantCount> kKeys = {"pm10", "sox", "nox", "co", "o3"};
constexpr std::array<std::string_view, 5> kStrategyNames = {"eg-cp", "eg-ncp", "eg-np", "cs", "nc"};

}  // namespace

std::string_view name_of(Pollutant p) { return kNames[index_of(p)]; }
std::string_view key_of(Pollutant p) { return kKeys[index_of(p)]; }

std::optional<Pollutant> pollutant_from_key(std::string_view key) {
  for (Pollutant p : kAllPollutants) {
    if (key == key_of(p)) return p;
  }
  return std::nullopt;
}

std::string_view name_of(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::optional<Strategy> strategy_from_name(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (name == name_of(s)) return s;
  }
  return std::nullopt;
}

void validate_source(const Source& source) {
  const std::string tag = "source " + std::to_string(source.id);
  if (!is_emitted(source.pollutant)) throw ValidationError(tag, "O3 cannot be emitted by a source");
  if (!(source.max_rate >= 0.0) || !std::isfinite(source.max_rate))
    throw ValidationError(tag, "max_rate must be finite and >= 0");
  if (!(source.emission_rate >= 0.0) || source.emission_rate > source.max_rate)
    throw ValidationError(tag, "emission_rate outside [0, max_rate]");
  if (!(source.stack_height >= 0.0)) throw ValidationError(tag, "stack_height must be >= 0");
}

// --- grid -------------------------------------------------------------------

bool GridBox::contains(const Vec3& p) const {
  return p.x >= origin.x && p.x < origin.x + edge && p.y >= origin.y && p.y < origin.y + edge &&
         p.z >= origin.z && p.z < origin.z + edge;
}

Grid::Grid(std::size_t box_count) {
  if (box_count == 0) throw DomainError("grid needs at least one box");
  boxes_.resize(box_count);
  for (std::size_t i = 0; i < box_count; ++i) {
    boxes_[i].id = static_cast<std::uint32_t>(i);
    boxes_[i].origin = {kBoxEdge * static_cast<double>(i), 0.0, 0.0};
  }
}

std::size_t Grid::box_of(const Vec3& p) const {
  const Vec3 ext = extent();
  if (!(p.x >= 0.0 && p.x <= ext.x && p.y >= 0.0 && p.y <= ext.y && p.z >= 0.0 && p.z <= ext.z))
    throw DomainError("position outside the grid extent");
  auto i = static_cast<std::size_t>(p.x / kBoxEdge);
  return std::min(i, boxes_.size() - 1);
}

void Grid::assign(std::span<const Source> sources) {
  for (auto& b : boxes_) b.member_sources.clear();
  for (const auto& s : sources) boxes_[box_of(s.position)].member_sources.push_back(s.id);
}

// --- air quality ------------------------------------------------------------

const AqBands& AqBands::standard() {
  static const AqBands bands({30, 60, 125, 250}, {45, 80, 200, 400}, {45, 80, 150, 270},
                             {20, 40, 100, 200});
  return bands;
}

AqBands::AqBands(Thresholds sox, Thresholds nox, Thresholds o3, Thresholds pm10) {
  thresholds_[index_of(Pollutant::SOx)] = sox;
  thresholds_[index_of(Pollutant::NOx)] = nox;
  thresholds_[index_of(Pollutant::O3)] = o3;
  thresholds_[index_of(Pollutant::PM10)] = pm10;
  for (Pollutant p : kClassified) {
    const auto& t = thresholds_[index_of(p)];
    if (!(t[0] > 0.0)) throw DomainError("band thresholds must be positive");
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!(t[i] > t[i - 1])) throw DomainError("band thresholds must be strictly increasing");
    }
  }
}

const AqBands::Thresholds& AqBands::thresholds(Pollutant p) const {
  if (!is_classified(p)) throw DomainError("CO carries no air-quality bands");
  return thresholds_[index_of(p)];
}

int AqBands::sub_index(Pollutant p, double concentration) const {
  if (!(concentration >= 0.0)) throw DomainError("negative or NaN concentration");
  const auto& t = thresholds(p);
  // Half-open bands: a value equal to a threshold belongs to the upper band.
  auto above = std::upper_bound(t.begin(), t.end(), concentration);
  return 1 + static_cast<int>(above - t.begin());
}

double AqBands::band_coordinate(Pollutant p, double concentration) const {
  const int q = sub_index(p, concentration);
  const auto& t = thresholds(p);
  if (q == kBands) {
    const double lo = t[kBands - 2];
    return 4.0 + std::min(1.0, (concentration - lo) / lo);
  }
  const double lo = q == 1 ? 0.0 : t[q - 2];
  const double hi = t[q - 1];
  return (q - 1) + (concentration - lo) / (hi - lo);
}

double AqBands::concentration_at(Pollutant p, double coordinate) const {
  if (!(coordinate >= 0.0 && coordinate <= 5.0)) throw DomainError("band coordinate outside [0, 5]");
  const auto& t = thresholds(p);
  const int band = std::min(4, static_cast<int>(coordinate));  // zero-based
  const double frac = coordinate - band;
  if (band == 4) return t[3] * (1.0 + frac);
  const double lo = band == 0 ? 0.0 : t[band - 1];
  return lo + frac * (t[band] - lo);
}

int classify_air_quality(const PerPollutant<double>& concentrations, const AqBands& bands) {
  int worst = 1;
  for (Pollutant p : AqBands::kClassified) {
    worst = std::max(worst, bands.sub_index(p, concentrations[index_of(p)]));
  }
  return worst;
}

double appreciation(int index) {
  if (index < 1 || index > 5) throw DomainError("air-quality index outside 1..5");
  return 6.0 - index;
}

}  // namespace airsim
