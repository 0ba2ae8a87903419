#pragma once

// Steady-state Gaussian plume dispersion from point sources, stability
// class C, with first-order decay and ground reflection.

#include <span>
#include <vector>

#include "airsim/core.hpp"

namespace airsim::dispersion {

struct Spread {
  double sigma_y = 0.0;  // m
  double sigma_z = 0.0;  // m
};

// Briggs open-country spread for class C. Throws DomainError for x <= 0.
Spread sigma_yz(double downwind);

// First-order decay coefficient in 1/h. Zero for PM10 and CO.
double decay_coefficient(Pollutant p);

// exp(-R * t) with t the travel time x/u expressed in hours.
double decay_term(double rate_per_hour, double downwind, double wind_speed);

inline constexpr double kGramsPerHourToMicrogramsPerSecond = 1e6 / 3600.0;

// Geometry-only part of the plume equation for a receptor in the plume frame:
//   exp(-y²/2σy²) [exp(-(z-H)²/2σz²) + exp(-(z+H)²/2σz²)] / (2π σy σz)
// Everything that depends on the wind speed or emission rate is applied on top.
struct PlumeGeometry {
  double downwind = 0.0;
  double factor = 0.0;  // 1/m²
};
PlumeGeometry plume_geometry(const Vec3& receptor, double effective_height);

// Concentration (µg/m³) at `receptor`, given in the source's plume frame
// (x downwind, y crosswind, z height above ground).
double plume_concentration(const Source& source, const Vec3& receptor, double wind_speed);

// World position relative to a source, rotated so x points downwind.
// `wind_direction` is the heading the wind blows towards, radians from +x.
Vec3 to_plume_frame(const Vec3& source, const Vec3& receptor, double wind_direction);

using BoxField = std::vector<PerPollutant<double>>;

// Sum of all plumes at each box centre (ground level). Upwind receptors
// contribute nothing.
BoxField aggregate_boxes(std::span<const Source> sources, const Grid& grid, const EnvState& env);

// Same sum as aggregate_boxes, with the geometry cached for a fixed source
// layout and wind direction. Results are bit-identical to aggregate_boxes.
class PlumeCache {
 public:
  PlumeCache(std::span<const Source> sources, const Grid& grid, double wind_direction);

  double wind_direction() const { return wind_direction_; }
  // `sources` must be the layout the cache was built from; only emission
  // rates may differ.
  BoxField evaluate(std::span<const Source> sources, double wind_speed) const;

 private:
  struct Term {
    std::size_t source;
    PlumeGeometry geometry;
  };
  double wind_direction_;
  std::size_t source_count_;
  std::vector<std::vector<Term>> per_box_;
};

}  // namespace airsim::dispersion
