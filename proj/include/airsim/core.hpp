#pragma once

// Shared vocabulary of the simulator: pollutants, emission sources, the box
// grid, environment snapshots, air-quality banding and scenario configuration.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace airsim {

enum class Pollutant : std::uint8_t { PM10 = 0, SOx = 1, NOx = 2, CO = 3, O3 = 4 };

inline constexpr std::size_t kPollutantCount = 5;
inline constexpr std::array<Pollutant, kPollutantCount> kAllPollutants = {
    Pollutant::PM10, Pollutant::SOx, Pollutant::NOx, Pollutant::CO, Pollutant::O3};
// Pollutants that point sources may emit. O3 forms in the air.
inline constexpr std::array<Pollutant, 4> kEmittedPollutants = {
    Pollutant::PM10, Pollutant::SOx, Pollutant::NOx, Pollutant::CO};

constexpr std::size_t index_of(Pollutant p) { return static_cast<std::size_t>(p); }
std::string_view name_of(Pollutant p);        // "PM10", "SOx", ...
std::string_view key_of(Pollutant p);         // "pm10", "sox", ...
std::optional<Pollutant> pollutant_from_key(std::string_view key);
constexpr bool is_emitted(Pollutant p) { return p != Pollutant::O3; }

// One value per pollutant, indexed by `index_of`.
template <typename T>
using PerPollutant = std::array<T, kPollutantCount>;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Source {
  std::uint32_t id = 0;
  Pollutant pollutant = Pollutant::PM10;
  double emission_rate = 0.0;  // g/h
  Vec3 position;               // m
  double stack_height = 0.0;   // m
  double max_rate = 0.0;       // g/h
};

// Throws ValidationError if the source breaks its invariants.
void validate_source(const Source& source);

inline constexpr double kBoxEdge = 1000.0;  // m

struct GridBox {
  std::uint32_t id = 0;
  Vec3 origin;
  double edge = kBoxEdge;
  PerPollutant<double> concentrations{};  // µg/m³
  int aq_index = 1;
  std::vector<std::uint32_t> member_sources;

  Vec3 centre() const { return {origin.x + edge / 2, origin.y + edge / 2, origin.z}; }
  bool contains(const Vec3& p) const;
};

// Horizontal strip of `count` boxes along x, one box deep in y.
class Grid {
 public:
  explicit Grid(std::size_t box_count);

  std::span<const GridBox> boxes() const { return boxes_; }
  std::span<GridBox> boxes() { return boxes_; }
  std::size_t size() const { return boxes_.size(); }
  Vec3 extent() const { return {kBoxEdge * static_cast<double>(boxes_.size()), kBoxEdge, kBoxEdge}; }

  // Index of the box holding `p`; positions on the far faces belong to the
  // last box. Throws DomainError when outside the extent.
  std::size_t box_of(const Vec3& p) const;
  // Rebuilds member lists so every source sits in exactly one box.
  void assign(std::span<const Source> sources);

 private:
  std::vector<GridBox> boxes_;
};

struct EnvState {
  std::int64_t step = 0;
  double wind_speed = 1.0;      // m/s
  double wind_direction = 0.0;  // rad, direction the wind blows towards
  double temperature = 0.0;     // °C
  double humidity = 0.0;        // %
  double rainfall = 0.0;        // mm
  std::vector<PerPollutant<double>> concentrations;  // per box, µg/m³
  int aq_index = 1;
};

// Air-quality banding per classified pollutant. Each band is [lo, hi); the
// top band is unbounded.
class AqBands {
 public:
  static constexpr int kBands = 5;
  using Thresholds = std::array<double, kBands - 1>;

  // Table of local standards: SOx, NOx, O3, PM10.
  static const AqBands& standard();

  AqBands(Thresholds sox, Thresholds nox, Thresholds o3, Thresholds pm10);

  // Pollutants that carry bands (CO does not).
  static constexpr std::array<Pollutant, 4> kClassified = {
      Pollutant::SOx, Pollutant::NOx, Pollutant::O3, Pollutant::PM10};
  static constexpr bool is_classified(Pollutant p) { return p != Pollutant::CO; }

  const Thresholds& thresholds(Pollutant p) const;
  int sub_index(Pollutant p, double concentration) const;
  // Continuous position inside the band ladder: band q covers [q-1, q),
  // saturating at 5 once a value reaches twice the top threshold.
  double band_coordinate(Pollutant p, double concentration) const;
  // Inverse of band_coordinate for coordinates in [0, 5].
  double concentration_at(Pollutant p, double coordinate) const;

 private:
  PerPollutant<Thresholds> thresholds_{};
};

// Worst sub-index over SOx, NOx, O3 and PM10. CO is ignored.
int classify_air_quality(const PerPollutant<double>& concentrations,
                         const AqBands& bands = AqBands::standard());

// Strictly decreasing appreciation of an index: 6 - q.
double appreciation(int index);

enum class Strategy : std::uint8_t { EgCp = 0, EgNcp = 1, EgNp = 2, Cs = 3, Nc = 4 };
inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::EgCp, Strategy::EgNcp, Strategy::EgNp, Strategy::Cs, Strategy::Nc};
std::string_view name_of(Strategy s);  // "eg-cp", ...
std::optional<Strategy> strategy_from_name(std::string_view name);
constexpr bool is_evolutionary(Strategy s) {
  return s == Strategy::EgCp || s == Strategy::EgNcp || s == Strategy::EgNp;
}

struct ScenarioConfig {
  PerPollutant<int> source_counts{100, 100, 100, 100, 0};
  double max_emission_rate = 2000.0;  // g/h
  // Pollutants without an entry have no regulatory goal (CO).
  PerPollutant<std::optional<double>> goal_levels{20.0, 30.0, 45.0, std::nullopt, 45.0};
  int goal_aq_index = 1;
  int memory_steps = 4;
  double initial_cooperator_proportion = 0.5;
  int box_count = 20;

  double initial_temperature = 12.7;
  double initial_humidity = 71.0;
  double initial_wind_speed = 2.4;
  double initial_rainfall = 0.0;
  PerPollutant<double> initial_concentrations{13.0, 17.0, 2.0, 0.5, 29.0};
  int initial_aq_index = 2;

  int total_hours = 4900;
  int step_hours = 2;
  int prediction_horizon = 2;

  Strategy strategy = Strategy::EgCp;
  double payoff_b = 2.0;
  double payoff_c = -0.5;
  std::uint64_t seed = 1;
  double action_step_fraction = 0.10;

  // Not part of the regulatory table; geometry and data plumbing.
  double initial_emission_fraction = 0.5;
  double stack_height_min = 20.0;
  double stack_height_max = 60.0;
  double wind_direction = 0.0;
  std::uint64_t dataset_seed = 2003;
  int dataset_hours = 17520;
  int max_centers = 40;
  int impute_window = 3;

  int total_steps() const { return total_hours / step_hours; }
  int total_sources() const;
  // Warnings about accepted-but-suspicious values (payoff constraint).
  std::vector<std::string> warnings() const;
};

using RawConfig = std::map<std::string, std::string, std::less<>>;

// Checks every invariant and fills unspecified keys with scenario defaults.
// Throws ValidationError naming the field; unknown keys are rejected too.
ScenarioConfig validate_scenario(const RawConfig& raw);
void validate_scenario(const ScenarioConfig& config);

// `key = value` lines; '#' starts a comment. Throws IoError / ValidationError.
RawConfig parse_key_values(std::string_view text, std::string_view origin = "<text>");
ScenarioConfig load_scenario(const std::string& path);
// Canonical text form; parsing it back yields an identical config.
std::string to_text(const ScenarioConfig& config);

}  // namespace airsim
