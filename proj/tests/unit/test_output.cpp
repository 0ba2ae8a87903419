#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "airsim/commands.hpp"
#include "airsim/error.hpp"
#include "airsim/output.hpp"
#include "fixtures.hpp"

using namespace airsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(std::string_view s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

// Work area with a short scenario and the small models saved to disk.
struct Workspace {
  fs::path root;
  std::string scenario, models;

  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / name) {
    fs::remove_all(root);
    fs::create_directories(root);
    scenario = (root / "small.scenario").string();
    std::ofstream(scenario) << to_text(testing::small_scenario());
    models = (root / "models").string();
    forecasting::save_models(testing::small_models(), models);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
};

}  // namespace

TEST_SUITE("cli-io") {
  TEST_CASE("seed lists") {
    CHECK(commands::parse_seeds("1-4") == std::vector<std::uint64_t>{1, 2, 3, 4});
    CHECK(commands::parse_seeds("7") == std::vector<std::uint64_t>{7});
    CHECK(commands::parse_seeds("1, 5,7-9") == std::vector<std::uint64_t>{1, 5, 7, 8, 9});
    CHECK_THROWS_AS(commands::parse_seeds("4-1"), ValidationError);
    CHECK_THROWS_AS(commands::parse_seeds("x"), ValidationError);
    CHECK_THROWS_AS(commands::parse_seeds(""), ValidationError);
  }

  TEST_CASE("strategy names") {
    CHECK(commands::parse_strategies("all").size() == 5);
    CHECK(commands::parse_strategies("eg-ncp") == std::vector<Strategy>{Strategy::EgNcp});
    try {
      commands::parse_strategies("greedy");
      FAIL("accepted an unknown strategy");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      for (Strategy s : kAllStrategies) CHECK(msg.find(name_of(s)) != std::string::npos);
    }
  }

  TEST_CASE("trajectory and metrics csv") {
    engine::Trajectory t;
    t.strategy = Strategy::Cs;
    for (int i = 1; i <= 3; ++i) {
      engine::StepRecord r;
      r.step = i;
      r.hour = 2 * i;
      r.aq_index = 2;
      r.concentrations = {1.5, 2, 3, 0.25, 40};
      r.coop_all = 0.5;
      t.steps.push_back(r);
    }
    const auto csv = output::trajectory_csv(t);
    const auto table = output::parse_table(csv);
    CHECK(table.columns.size() == 13);
    CHECK(table.rows.size() == 3);
    CHECK(csv.substr(0, csv.find('\n')) == output::kTrajectoryHeader);
    CHECK(table.numbers("pm10")[0] == 1.5);
    CHECK(table.numbers("hour") == std::vector<double>{2, 4, 6});

    const auto m = engine::compute_metrics(t);
    const auto row = output::metrics_row(Strategy::Cs, 9, m);
    CHECK(count(row, ',') == count(output::kMetricsHeader, ','));
    CHECK(row.rfind("cs,9,2,", 0) == 0);

    auto other = t;
    other.steps.pop_back();
    CHECK_THROWS_AS(output::mean_series_csv({t, other}), DomainError);
    CHECK(output::mean_series_csv({t, t}) == csv);
    CHECK_THROWS_AS(output::parse_table("a,b\n1\n"), ValidationError);
    CHECK_THROWS_AS(output::parse_table(csv).numbers("nope"), ValidationError);
  }

  TEST_CASE("charts are pure functions of their input") {
    output::Series s{"x", {0, 1, 2}, {1, 3, 2}};
    const auto a = output::line_chart("t", "x", "y", {s});
    CHECK(a == output::line_chart("t", "x", "y", {s}));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(output::line_chart("a<b", "x", "y", {s}).find("a&lt;b") != std::string::npos);
    s.y.pop_back();
    CHECK_THROWS_AS(output::line_chart("t", "x", "y", {s}), DomainError);
  }

  TEST_CASE("run writes results and compare ranks them") {
    Workspace ws("airsim_cli_io_test");
    commands::RunOptions o;
    o.scenario = ws.scenario;
    o.models = ws.models;
    o.strategy = "cs";
    o.seeds = "1-2";
    o.out = (ws.root / "run_cs").string();
    commands::run(o);
    const fs::path cs(o.out);
    for (auto f : {"manifest.json", "metrics.csv", "summary.csv", "cs/series.csv", "cs/aq_index.svg",
                   "cs/concentrations.svg", "cs/cooperation.svg", "cs/seed_1/trajectory.csv", "cs/seed_2/metrics.csv"})
      CHECK_MESSAGE(fs::exists(cs / f), f);
    const auto traj = slurp(cs / "cs/seed_1/trajectory.csv");
    CHECK(count(traj, '\n') == 121);
    const auto table = output::parse_table(slurp(cs / "cs/series.csv"));
    CHECK(output::aq_chart(table) == slurp(cs / "cs/aq_index.svg"));
    CHECK(output::cooperation_chart(table) == slurp(cs / "cs/cooperation.svg"));

    o.strategy = "nc";
    o.out = (ws.root / "run_nc").string();
    commands::run(o);
    const auto ranking = commands::compare({(ws.root / "run_nc").string(), (ws.root / "run_cs").string()});
    const auto first = ranking.find('\n') + 1;
    CHECK(ranking.substr(first, ranking.find('\n', first) - first).find("cs") != std::string::npos);

    CHECK_THROWS_AS(commands::compare({cs.string()}), ValidationError);

    auto changed = testing::small_scenario();
    changed.payoff_b = 3.0;
    std::ofstream((ws.root / "changed.scenario").string()) << to_text(changed);
    o.scenario = (ws.root / "changed.scenario").string();
    o.out = (ws.root / "run_changed").string();
    commands::run(o);
    CHECK_THROWS_AS(commands::compare({cs.string(), o.out}), ValidationError);

    o.models = (ws.root / "nowhere").string();
    CHECK_THROWS_AS(commands::run(o), IoError);
  }
}
