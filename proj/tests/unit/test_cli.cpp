#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = AIRSIM_TEST_WORK;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code = -1;
  std::string out, err;
};

Result cli(const std::string& args) {
  fs::create_directories(kWork);
  const auto out = kWork / "stdout.txt", err = kWork / "stderr.txt";
  const std::string cmd = std::string("\"") + AIRSIM_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and usage") {
    auto r = cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find('.') != std::string::npos);
    r = cli("");
    CHECK(r.code == 2);
    r = cli("run --no-such-flag");
    CHECK(r.code == 2);
  }

  TEST_CASE("synth is deterministic") {
    auto a = cli("synth --hours 48 --seed 5 --out " + q(kWork / "a.csv"));
    auto b = cli("synth --hours 48 --seed 5 --out " + q(kWork / "b.csv"));
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const auto text = slurp(kWork / "a.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 49);
    CHECK(text == slurp(kWork / "b.csv"));
    CHECK(cli("synth --hours 10 --out " + q(kWork / "c.csv")).code == 2);
  }

  TEST_CASE("unknown strategy lists the valid names") {
    const auto r = cli("run --strategy greedy --out " + q(kWork / "x"));
    CHECK(r.code == 2);
    for (auto name : {"eg-cp", "eg-ncp", "eg-np", "cs", "nc"}) CHECK(r.err.find(name) != std::string::npos);
  }

  TEST_CASE("missing models point at train") {
    const auto r = cli("run --strategy cs --models " + q(kWork / "empty_models") + " --out " + q(kWork / "y"));
    CHECK(r.code == 3);
    CHECK(r.err.find("airsim train") != std::string::npos);
  }

  TEST_CASE("corrupt dataset names the line") {
    std::ofstream(kWork / "bad.csv") << "timestamp,ws,t,hu,rf,pm10,sox,nox,co,o3\n"
                                     << "0,1,2,3,0,10,10,10,1,10\n"
                                     << "3600,1,2,oops,0,10,10,10,1,10\n";
    const auto r = cli("train --dataset " + q(kWork / "bad.csv") + " --models " + q(kWork / "m"));
    CHECK(r.code == 2);
    CHECK(r.err.find("bad.csv:3") != std::string::npos);
  }

  TEST_CASE("compare needs two runs") {
    const auto r = cli("compare " + q(kWork));
    CHECK(r.code == 2);
    CHECK(r.err.find("need two runs") != std::string::npos);
  }

  TEST_CASE("run and compare end to end") {
    const auto models = kWork / "small_models";
    airsim::forecasting::save_models(airsim::testing::small_models(), models.string());
    std::ofstream(kWork / "small.scenario") << airsim::to_text(airsim::testing::small_scenario());
    const std::string common = " --scenario " + q(kWork / "small.scenario") + " --models " + q(models) + " --seeds 1-2";
    fs::remove_all(kWork / "eg");
    fs::remove_all(kWork / "base");
    auto r = cli("run --strategy eg-cp --out " + q(kWork / "eg") + common);
    REQUIRE(r.code == 0);
    CHECK(r.err.find("eg-cp seed 2") != std::string::npos);
    r = cli("run --strategy nc --out " + q(kWork / "base") + common);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(kWork / "eg" / "eg-cp" / "seed_2" / "trajectory.csv"));
    r = cli("compare " + q(kWork / "base") + " " + q(kWork / "eg"));
    CHECK(r.code == 0);
    CHECK(r.out.find("eg-cp") < r.out.find("nc "));
  }
}
