#include <doctest.h>

#include <cmath>

#include "airsim/dispersion.hpp"
#include "airsim/error.hpp"
#include "airsim/random.hpp"

using namespace airsim;
using namespace airsim::dispersion;

namespace {

// Plume equation evaluated from scratch in extended precision.
long double reference_plume(long double er_g_per_h, long double u, long double x, long double y, long double z,
                            long double h, long double r) {
  const long double sy = 0.11L * x / std::sqrt(1.0L + 0.0001L * x);
  const long double sz = 0.08L * x / std::sqrt(1.0L + 0.0002L * x);
  const long double q = er_g_per_h * 1.0e6L / 3600.0L;
  const long double d = r == 0.0L ? 1.0L : std::exp(-r * (x / u) / 3600.0L);
  const long double pi = 3.141592653589793238462643383279502884L;
  return q * d / (2.0L * pi * u * sy * sz) * std::exp(-y * y / (2.0L * sy * sy)) *
         (std::exp(-(z - h) * (z - h) / (2.0L * sz * sz)) + std::exp(-(z + h) * (z + h) / (2.0L * sz * sz)));
}

Source make(Pollutant p, double rate, double h, Vec3 pos = {}) {
  Source s;
  s.pollutant = p;
  s.emission_rate = rate;
  s.max_rate = 1e9;
  s.stack_height = h;
  s.position = pos;
  return s;
}

}  // namespace

TEST_SUITE("dispersion") {
  TEST_CASE("class C spread") {
    auto s = sigma_yz(1000);
    CHECK(s.sigma_y == doctest::Approx(104.88).epsilon(1e-4));
    CHECK(s.sigma_z == doctest::Approx(73.03).epsilon(1e-4));
    s = sigma_yz(100);
    CHECK(s.sigma_y == doctest::Approx(11.0 / std::sqrt(1.01)).epsilon(1e-14));
    CHECK(s.sigma_z == doctest::Approx(8.0 / std::sqrt(1.02)).epsilon(1e-14));
    CHECK(sigma_yz(2000).sigma_y > sigma_yz(1000).sigma_y);
    CHECK_THROWS_AS(sigma_yz(0), DomainError);
  }

  TEST_CASE("decay term") {
    CHECK(decay_term(0.0, 123, 4) == 1.0);
    CHECK(decay_term(0.45, 7200, 2) == doctest::Approx(std::exp(-0.45)).epsilon(1e-14));
    CHECK(decay_term(0.31, 3600, 1) == doctest::Approx(0.7334).epsilon(1e-4));
    CHECK(decay_coefficient(Pollutant::NOx) == 0.45);
    CHECK(decay_coefficient(Pollutant::SOx) == 0.31);
    CHECK(decay_coefficient(Pollutant::PM10) == 0.0);
    CHECK_THROWS_AS(decay_term(0.45, 100, 0), DomainError);
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform(1, 20000), u = rng.uniform(0.1, 10);
      const double d1 = decay_term(0.45, x, u), d2 = decay_term(0.45, x * 1.01, u);
      CHECK(d1 > 0.0);
      CHECK(d1 <= 1.0);
      CHECK(d2 < d1);
    }
  }

  TEST_CASE("worked example") {
    const auto s = make(Pollutant::PM10, 1000.0, 50.0);
    const double c = plume_concentration(s, {1000, 0, 0}, 2.0);
    CHECK(c == doctest::Approx(4.57).epsilon(1e-3));
    CHECK(c == doctest::Approx(static_cast<double>(reference_plume(1000, 2, 1000, 0, 0, 50, 0))).epsilon(1e-12));
    CHECK(plume_concentration(make(Pollutant::PM10, 0.0, 50.0), {1000, 0, 0}, 2.0) == 0.0);
    CHECK_THROWS_AS(plume_concentration(s, {-5, 0, 0}, 2.0), DomainError);
    CHECK_THROWS_AS(plume_concentration(s, {100, 0, 0}, 0.0), DomainError);
  }

  TEST_CASE("random cases against the reference") {
    Rng rng(17);
    for (int i = 0; i < 5000; ++i) {
      const Pollutant p = kEmittedPollutants[rng.below(4)];
      const double er = rng.uniform(0, 2000), h = rng.uniform(0, 100), u = rng.uniform(0.2, 9);
      const Vec3 r{rng.uniform(1, 20000), rng.uniform(-500, 500), rng.uniform(0, 200)};
      const double got = plume_concentration(make(p, er, h), r, u);
      const auto want = reference_plume(er, u, r.x, r.y, r.z, h, decay_coefficient(p));
      CHECK(got >= 0.0);
      CHECK(got == doctest::Approx(static_cast<double>(want)).epsilon(1e-11));
    }
  }

  TEST_CASE("symmetry, reflection and linearity") {
    const auto s = make(Pollutant::NOx, 800, 35);
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
      const double x = rng.uniform(10, 5000), y = rng.uniform(0, 400), z = rng.uniform(0, 100);
      CHECK(plume_concentration(s, {x, y, z}, 3) == plume_concentration(s, {x, -y, z}, 3));
      const auto g = plume_geometry({x, 0, 0}, 35);
      const auto sp = sigma_yz(x);
      const double expect = 2.0 * std::exp(-35.0 * 35.0 / (2 * sp.sigma_z * sp.sigma_z)) /
                            (2 * 3.14159265358979323846 * sp.sigma_y * sp.sigma_z);
      CHECK(g.factor == doctest::Approx(expect).epsilon(1e-12));
      auto twice = s;
      twice.emission_rate *= 2;
      CHECK(plume_concentration(twice, {x, y, z}, 3) ==
            doctest::Approx(2 * plume_concentration(s, {x, y, z}, 3)).epsilon(1e-12));
    }
  }

  TEST_CASE("frame rotation") {
    const Vec3 r = to_plume_frame({100, 200, 0}, {100, 1200, 5}, std::acos(-1.0) / 2);
    CHECK(r.x == doctest::Approx(1000.0));
    CHECK(r.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.z == 5.0);
  }

  TEST_CASE("box aggregation") {
    Grid grid(5);
    EnvState env;
    env.wind_speed = 2.5;
    CHECK(aggregate_boxes({}, grid, env) == BoxField(5, PerPollutant<double>{}));

    std::vector<Source> one{make(Pollutant::SOx, 1500, 40, {200, 500, 0})};
    const auto f1 = aggregate_boxes(one, grid, env);
    CHECK(f1[0][index_of(Pollutant::SOx)] == plume_concentration(one[0], {300, 0, 0}, 2.5));
    CHECK(f1[2][index_of(Pollutant::SOx)] == plume_concentration(one[0], {2300, 0, 0}, 2.5));
    CHECK(f1[2][index_of(Pollutant::PM10)] == 0.0);

    auto two = one;
    two.push_back(one[0]);
    two[1].id = 1;
    const auto f2 = aggregate_boxes(two, grid, env);
    for (std::size_t b = 0; b < 5; ++b)
      CHECK(f2[b][index_of(Pollutant::SOx)] == doctest::Approx(2 * f1[b][index_of(Pollutant::SOx)]).epsilon(1e-12));

    // Upwind boxes receive nothing.
    std::vector<Source> late{make(Pollutant::CO, 900, 30, {3800, 500, 0})};
    const auto f3 = aggregate_boxes(late, grid, env);
    CHECK(f3[0][index_of(Pollutant::CO)] == 0.0);
    CHECK(f3[3][index_of(Pollutant::CO)] == 0.0);  // receptor at 3500 is upwind
    CHECK(f3[4][index_of(Pollutant::CO)] > 0.0);
  }

  TEST_CASE("cache matches direct aggregation bit for bit") {
    Grid grid(20);
    Rng rng(8);
    std::vector<Source> sources;
    for (std::uint32_t i = 0; i < 120; ++i) {
      auto s = make(kEmittedPollutants[i % 4], rng.uniform(0, 2000), rng.uniform(20, 60),
                    {rng.uniform(0, 20000), rng.uniform(0, 1000), 0});
      s.id = i;
      sources.push_back(s);
    }
    for (double dir : {0.0, 0.3, -2.0}) {
      PlumeCache cache(sources, grid, dir);
      EnvState env;
      env.wind_direction = dir;
      for (double u : {0.5, 2.65, 7.0}) {
        env.wind_speed = u;
        CHECK(cache.evaluate(sources, u) == aggregate_boxes(sources, grid, env));
      }
    }
  }
}
