#include "airsim/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "airsim/error.hpp"

namespace airsim::dispersion {

Spread sigma_yz(double downwind) {
  if (!(downwind > 0.0)) throw DomainError("plume spread needs a positive downwind distance");
  return {0.11 * downwind / std::sqrt(1.0 + 0.0001 * downwind),
          0.08 * downwind / std::sqrt(1.0 + 0.0002 * downwind)};
}

double decay_coefficient(Pollutant p) {
  switch (p) {
    case Pollutant::NOx: return 0.45;
    case Pollutant::SOx: return 0.31;
    default: return 0.0;
  }
}

double decay_term(double rate_per_hour, double downwind, double wind_speed) {
  if (!(wind_speed > 0.0)) throw DomainError("decay term needs a positive wind speed");
  if (!(rate_per_hour >= 0.0)) throw DomainError("decay coefficient must be >= 0");
  if (rate_per_hour == 0.0) return 1.0;
  if (!(downwind > 0.0)) throw DomainError("decay term needs a positive downwind distance");
  const double travel_hours = (downwind / wind_speed) / 3600.0;
  return std::exp(-rate_per_hour * travel_hours);
}

PlumeGeometry plume_geometry(const Vec3& r, double h) {
  const Spread s = sigma_yz(r.x);
  const double two_vy = 2.0 * s.sigma_y * s.sigma_y;
  const double two_vz = 2.0 * s.sigma_z * s.sigma_z;
  const double crosswind = std::exp(-(r.y * r.y) / two_vy);
  const double below = r.z - h;
  const double above = r.z + h;
  const double vertical = std::exp(-(below * below) / two_vz) + std::exp(-(above * above) / two_vz);
  return {r.x, crosswind * vertical / (2.0 * std::numbers::pi * s.sigma_y * s.sigma_z)};
}

namespace {

double effective_height(const Source& s) { return s.position.z + s.stack_height; }

double apply(const Source& s, const PlumeGeometry& g, double wind_speed) {
  const double q = s.emission_rate * kGramsPerHourToMicrogramsPerSecond;
  const double d = decay_term(decay_coefficient(s.pollutant), g.downwind, wind_speed);
  return (q * d / wind_speed) * g.factor;
}

}  // namespace

double plume_concentration(const Source& source, const Vec3& receptor, double wind_speed) {
  if (!(wind_speed > 0.0)) throw DomainError("plume needs a positive wind speed");
  if (!(receptor.x > 0.0)) throw DomainError("receptor must lie downwind of the source");
  if (!(source.emission_rate >= 0.0)) throw DomainError("emission rate must be >= 0");
  return apply(source, plume_geometry(receptor, effective_height(source)), wind_speed);
}

Vec3 to_plume_frame(const Vec3& source, const Vec3& receptor, double wind_direction) {
  const double dx = receptor.x - source.x;
  const double dy = receptor.y - source.y;
  const double c = std::cos(wind_direction);
  const double s = std::sin(wind_direction);
  return {dx * c + dy * s, -dx * s + dy * c, receptor.z};
}

BoxField aggregate_boxes(std::span<const Source> sources, const Grid& grid, const EnvState& env) {
  if (!(env.wind_speed > 0.0)) throw DomainError("aggregation needs a positive wind speed");
  BoxField field(grid.size(), PerPollutant<double>{});
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const Vec3 receptor = grid.boxes()[b].centre();
    for (const auto& s : sources) {
      const Vec3 local = to_plume_frame(s.position, receptor, env.wind_direction);
      if (!(local.x > 0.0)) continue;
      field[b][index_of(s.pollutant)] += plume_concentration(s, local, env.wind_speed);
    }
  }
  return field;
}

PlumeCache::PlumeCache(std::span<const Source> sources, const Grid& grid, double wind_direction)
    : wind_direction_(wind_direction), source_count_(sources.size()), per_box_(grid.size()) {
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const Vec3 receptor = grid.boxes()[b].centre();
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const Vec3 local = to_plume_frame(sources[i].position, receptor, wind_direction);
      if (!(local.x > 0.0)) continue;
      per_box_[b].push_back({i, plume_geometry(local, effective_height(sources[i]))});
    }
  }
}

BoxField PlumeCache::evaluate(std::span<const Source> sources, double wind_speed) const {
  if (sources.size() != source_count_) throw DomainError("source layout differs from the cached one");
  if (!(wind_speed > 0.0)) throw DomainError("aggregation needs a positive wind speed");
  BoxField field(per_box_.size(), PerPollutant<double>{});
  for (std::size_t b = 0; b < per_box_.size(); ++b) {
    for (const auto& term : per_box_[b]) {
      const Source& s = sources[term.source];
      field[b][index_of(s.pollutant)] += apply(s, term.geometry, wind_speed);
    }
  }
  return field;
}

}  // namespace airsim::dispersion
