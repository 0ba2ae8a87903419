#include <doctest.h>

#include <cmath>

#include "airsim/engine.hpp"
#include "airsim/error.hpp"
#include "fixtures.hpp"

using namespace airsim;
using namespace airsim::engine;
using airsim::testing::small_climate;
using airsim::testing::small_models;
using airsim::testing::small_scenario;

TEST_SUITE("engine") {
  TEST_CASE("apply action") {
    CHECK(apply_action(1000, game::Command::Increase, 0.1, 2000) == doctest::Approx(1100));
    CHECK(apply_action(1000, game::Command::Decrease, 0.1, 2000) == doctest::Approx(900));
    CHECK(apply_action(2000, game::Command::Increase, 0.1, 2000) == 2000);
    CHECK(apply_action(1234.5, game::Command::Hold, 0.1, 2000) == 1234.5);
    CHECK(apply_action(0, game::Command::Increase, 0.1, 2000) == 0);
  }

  TEST_CASE("source layout") {
    const auto cfg = small_scenario();
    Grid grid(static_cast<std::size_t>(cfg.box_count));
    Rng rng(3);
    const auto sources = make_sources(cfg, grid, rng);
    CHECK(sources.size() == 16);
    for (const auto& s : sources) {
      validate_source(s);
      CHECK(s.emission_rate == doctest::Approx(cfg.initial_emission_fraction * cfg.max_emission_rate));
      CHECK(s.stack_height >= cfg.stack_height_min);
      CHECK(s.stack_height <= cfg.stack_height_max);
      CHECK(s.pollutant != Pollutant::O3);
    }
  }

  TEST_CASE("trajectory length and determinism") {
    const auto cfg = small_scenario();
    for (Strategy s : kAllStrategies) {
      const auto a = run(cfg, s, 7, small_models(), small_climate());
      const auto b = run(cfg, s, 7, small_models(), small_climate());
      REQUIRE(a.steps.size() == 120);
      CHECK(a.steps.back().hour == 240);
      bool same = a.cumulative_reward == b.cumulative_reward;
      for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const auto &x = a.steps[i], &y = b.steps[i];
        same = same && x.aq_index == y.aq_index && x.concentrations == y.concentrations && x.coop == y.coop &&
               x.coop_all == y.coop_all;
      }
      CHECK(same);
    }
    CHECK(small_scenario().total_steps() == 120);
    ScenarioConfig table;
    CHECK(table.total_steps() == 2450);
  }

  TEST_CASE("no sources") {
    auto cfg = small_scenario();
    cfg.source_counts = {0, 0, 0, 0, 0};
    Simulation sim(cfg, Strategy::Nc, 1, small_models(), small_climate());
    while (!sim.done()) {
      const auto r = sim.step();
      CHECK(r.aq_index == 1);
      CHECK(r.coop_all == 0.0);
      for (const auto& box : sim.grid().boxes()) CHECK(box.aq_index == 1);
    }
    CHECK_THROWS_AS(sim.step(), DomainError);
  }

  TEST_CASE("no cooperation saturates every source") {
    Simulation sim(small_scenario(), Strategy::Nc, 2, small_models(), small_climate());
    CHECK_FALSE(sim.population().has_value());
    for (int i = 0; i < 20; ++i) sim.step();
    for (const auto& s : sim.state().sources) CHECK(s.emission_rate == s.max_rate);
    while (!sim.done()) {
      const auto r = sim.step();
      CHECK(r.coop_all == 0.0);
    }
    for (const auto& s : sim.state().sources) CHECK(s.emission_rate == s.max_rate);
  }

  TEST_CASE("rates stay in bounds and agents are conserved") {
    const auto cfg = small_scenario();
    for (Strategy st : {Strategy::EgCp, Strategy::EgNp, Strategy::Cs}) {
      Simulation sim(cfg, st, 11, small_models(), small_climate());
      while (!sim.done()) {
        const auto r = sim.step();
        for (const auto& s : sim.state().sources) {
          REQUIRE(s.emission_rate >= 0.0);
          REQUIRE(s.emission_rate <= s.max_rate);
        }
        CHECK(r.coop_all >= 0.0);
        CHECK(r.coop_all <= 1.0);
        if (const auto& pop = sim.population()) {
          for (Pollutant p : kEmittedPollutants) {
            std::size_t defectors = 0;
            for (const auto& a : pop->agents())
              if (a.group == p && a.action == game::Action::Defect) ++defectors;
            CHECK(pop->cooperators(p) + defectors == pop->group_size(p));
            CHECK(pop->group_size(p) == 4);
          }
        }
      }
    }
  }

  TEST_CASE("central strategy holds or decreases") {
    Simulation sim(small_scenario(), Strategy::Cs, 5, small_models(), small_climate());
    for (int i = 0; i < 30; ++i) {
      sim.step();
      for (auto c : sim.state().commands) CHECK(c != game::Command::Increase);
    }
  }

  TEST_CASE("bad inputs") {
    auto cfg = small_scenario();
    cfg.prediction_horizon = 3;
    CHECK_THROWS_AS(Simulation(cfg, Strategy::Cs, 1, small_models(), small_climate()), DomainError);
    forecasting::ForecastModels empty;
    CHECK_THROWS_AS(Simulation(small_scenario(), Strategy::Cs, 1, empty, small_climate()), DomainError);
    const auto shorter = forecasting::synthesize_dataset(forecasting::regional_stats(), 100, 1);
    CHECK_THROWS_AS(Simulation(small_scenario(), Strategy::Cs, 1, small_models(), shorter), DomainError);
  }

  TEST_CASE("metrics") {
    Trajectory t;
    t.initial_aq_index = 3;
    for (int i = 1; i <= 150; ++i) {
      StepRecord r;
      r.step = i;
      r.hour = 2 * i;
      r.aq_index = i < 10 ? 3 : 2;
      r.coop_all = 0.77;
      t.steps.push_back(r);
    }
    auto m = compute_metrics(t);
    CHECK(m.equilibrium_step == 1);
    CHECK(m.equilibrium_cooperation == doctest::Approx(0.77));
    CHECK(m.aq_histogram[1] + m.aq_histogram[2] == 150);
    CHECK(m.aq_histogram[2] == 9);
    CHECK(m.improvements == 1);
    CHECK(m.first_improvement == 10);
    CHECK(m.final_aq_index == 2);

    for (auto& s : t.steps) s.aq_index = 4;
    m = compute_metrics(t);
    CHECK(m.aq_histogram[3] == 150);

    std::vector<double> series(50, 0.2);
    for (int i = 0; i < 120; ++i) series.push_back(0.6 + 0.04 * std::sin(i));
    CHECK(equilibrium_index(series) == 50);
    series.resize(120);
    CHECK_FALSE(equilibrium_index(series).has_value());
    CHECK_THROWS_AS(compute_metrics(Trajectory{}), DomainError);
  }
}
