#include <doctest.h>

#include <set>

#include "airsim/core.hpp"
#include "airsim/error.hpp"
#include "airsim/random.hpp"

using namespace airsim;

namespace {

PerPollutant<double> conc(double sox, double nox, double o3, double pm10, double co = 0.0) {
  PerPollutant<double> c{};
  c[index_of(Pollutant::SOx)] = sox;
  c[index_of(Pollutant::NOx)] = nox;
  c[index_of(Pollutant::O3)] = o3;
  c[index_of(Pollutant::PM10)] = pm10;
  c[index_of(Pollutant::CO)] = co;
  return c;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("classification examples") {
    CHECK(classify_air_quality(conc(10, 20, 20, 10)) == 1);
    CHECK(classify_air_quality(conc(10, 20, 20, 250)) == 5);
    CHECK(classify_air_quality(conc(0, 0, 0, 0)) == 1);
    CHECK(classify_air_quality(conc(0, 0, 0, 0, 1000.0)) == 1);  // CO has no band
    CHECK_THROWS_AS(classify_air_quality(conc(-1, 0, 0, 0)), DomainError);
  }

  TEST_CASE("band edges are half-open") {
    const auto& bands = AqBands::standard();
    const std::array<std::pair<Pollutant, AqBands::Thresholds>, 4> table = {{
        {Pollutant::SOx, {30, 60, 125, 250}},
        {Pollutant::NOx, {45, 80, 200, 400}},
        {Pollutant::O3, {45, 80, 150, 270}},
        {Pollutant::PM10, {20, 40, 100, 200}},
    }};
    for (const auto& [p, t] : table) {
      CHECK(bands.thresholds(p) == t);
      for (int i = 0; i < 4; ++i) {
        CHECK(bands.sub_index(p, std::nextafter(t[i], 0.0)) == i + 1);
        CHECK(bands.sub_index(p, t[i]) == i + 2);
      }
    }
  }

  TEST_CASE("classification is monotone in each pollutant") {
    Rng rng(11);
    for (int n = 0; n < 2000; ++n) {
      auto c = conc(rng.uniform(0, 300), rng.uniform(0, 500), rng.uniform(0, 350), rng.uniform(0, 250));
      const int before = classify_air_quality(c);
      c[rng.below(5)] += rng.uniform(0, 100);
      CHECK(classify_air_quality(c) >= before);
    }
  }

  TEST_CASE("band coordinate round trip") {
    const auto& bands = AqBands::standard();
    for (Pollutant p : AqBands::kClassified) {
      for (double u = 0.0; u <= 5.0; u += 0.125) {
        const double c = bands.concentration_at(p, u);
        CHECK(bands.band_coordinate(p, c) == doctest::Approx(u).epsilon(1e-12));
        if (u < 5.0) CHECK(bands.sub_index(p, c) == std::min(5, static_cast<int>(u) + 1));
      }
    }
  }

  TEST_CASE("appreciation") {
    CHECK(appreciation(1) == 5.0);
    CHECK(appreciation(5) == 1.0);
    for (int q = 1; q < 5; ++q) CHECK(appreciation(q) > appreciation(q + 1));
    CHECK_THROWS_AS(appreciation(0), DomainError);
    CHECK_THROWS_AS(appreciation(6), DomainError);
  }

  TEST_CASE("grid partitions sources") {
    Grid grid(20);
    CHECK(grid.extent().x == 20000.0);
    Rng rng(3);
    std::vector<Source> sources;
    for (std::uint32_t i = 0; i < 300; ++i) {
      Source s;
      s.id = i;
      s.position = {rng.uniform(0, 20000), rng.uniform(0, 1000), 0};
      sources.push_back(s);
    }
    sources.back().position.x = 20000.0;  // far face
    grid.assign(sources);
    std::set<std::uint32_t> seen;
    std::size_t total = 0;
    for (const auto& b : grid.boxes()) {
      for (auto id : b.member_sources) {
        const auto& p = sources[id].position;
        CHECK((b.contains(p) || (p.x == 20000.0 && b.id == 19)));
        seen.insert(id);
      }
      total += b.member_sources.size();
    }
    CHECK(total == sources.size());
    CHECK(seen.size() == sources.size());
    CHECK_THROWS_AS(grid.box_of({-1, 0, 0}), DomainError);
  }

  TEST_CASE("sources") {
    Source s{1, Pollutant::NOx, 100, {0, 0, 0}, 30, 2000};
    CHECK_NOTHROW(validate_source(s));
    s.pollutant = Pollutant::O3;
    CHECK_THROWS_AS(validate_source(s), ValidationError);
    s.pollutant = Pollutant::NOx;
    s.emission_rate = 2500;
    CHECK_THROWS_AS(validate_source(s), ValidationError);
  }

  TEST_CASE("scenario defaults and validation") {
    const auto c = validate_scenario(RawConfig{});
    CHECK(c.total_steps() == 2450);
    CHECK(c.total_sources() == 400);
    CHECK(c.goal_levels[index_of(Pollutant::PM10)] == 20.0);
    CHECK_FALSE(c.goal_levels[index_of(Pollutant::CO)].has_value());
    CHECK(c.warnings().size() == 1);

    try {
      validate_scenario(RawConfig{{"memory_steps", "0"}});
      FAIL("expected rejection");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "memory_steps");
      CHECK(std::string(e.what()).find("memory length") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_scenario(RawConfig{{"initial_cooperator_proportion", "1.5"}}), ValidationError);
    CHECK_THROWS_AS(validate_scenario(RawConfig{{"no_such_key", "1"}}), ValidationError);
    CHECK_THROWS_AS(validate_scenario(RawConfig{{"total_hours", "4901"}}), ValidationError);
    CHECK_THROWS_AS(validate_scenario(RawConfig{{"payoff_b", "nan"}}), ValidationError);
  }

  TEST_CASE("scenario text round trip") {
    auto raw = parse_key_values("# test\nstrategy = cs\ngoal_pm10_level = 25 # looser\nseed=9\n");
    const auto c = validate_scenario(raw);
    CHECK(c.strategy == Strategy::Cs);
    CHECK(c.seed == 9);
    const auto again = validate_scenario(parse_key_values(to_text(c)));
    CHECK(to_text(again) == to_text(c));
    CHECK(again.goal_levels[index_of(Pollutant::PM10)] == 25.0);
    CHECK_THROWS_AS(parse_key_values("seed = 1\nseed = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_key_values("just words\n"), ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.txt"), IoError);
  }

  TEST_CASE("strategy names") {
    for (Strategy s : kAllStrategies) CHECK(strategy_from_name(name_of(s)) == s);
    CHECK_FALSE(strategy_from_name("greedy").has_value());
  }
}
