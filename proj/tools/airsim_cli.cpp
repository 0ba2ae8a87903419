// airsim: synthesize data, train the forecasters, run and compare strategies.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "airsim/airsim.h"

namespace {

int exit_code(airsim_status s) {
  switch (s) {
    case AIRSIM_OK:
      return 0;
    case AIRSIM_ERR_ARGUMENT:
    case AIRSIM_ERR_VALIDATION:
      return 2;
    case AIRSIM_ERR_IO:
      return 3;
    case AIRSIM_ERR_TRAINING:
      return 4;
    default:
      return 1;
  }
}

int report(airsim_status s) {
  if (s != AIRSIM_OK) std::fprintf(stderr, "airsim: %s: %s\n", airsim_status_name(s), airsim_last_error());
  return exit_code(s);
}

void print_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based air-quality simulator with cooperative emission control"};
  app.set_version_flag("--version", airsim_version());
  app.require_subcommand(1);

  std::size_t hours = 17520;
  std::uint64_t synth_seed = 2003;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic hourly dataset");
  synth->add_option("--hours", hours, "Number of hourly rows")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  std::string scenario, dataset, models = "models";
  auto* train = app.add_subcommand("train", "Train the five RBF forecasters and the AQ classifier");
  train->add_option("--scenario", scenario, "Scenario file (defaults when omitted)");
  train->add_option("--dataset", dataset, "Dataset CSV (synthetic when omitted)");
  train->add_option("--models", models, "Model directory")->capture_default_str();

  std::string strategy = "all", seeds = "1", out = "out";
  bool train_first = false;
  auto* run = app.add_subcommand("run", "Run strategies over seeds and write CSV and SVG results");
  run->add_option("--scenario", scenario, "Scenario file (defaults when omitted)");
  run->add_option("--strategy", strategy, "eg-cp, eg-ncp, eg-np, cs, nc or all")->capture_default_str();
  run->add_option("--seeds", seeds, "Seeds, e.g. 1-16 or 1,3,5")->capture_default_str();
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--models", models, "Model directory")->capture_default_str();
  run->add_option("--dataset", dataset, "Dataset CSV for climate forcing (synthetic when omitted)");
  run->add_flag("--train-first", train_first, "Train models before running");

  std::vector<std::string> dirs;
  auto* compare = app.add_subcommand("compare", "Rank strategies across run directories");
  compare->add_option("dirs", dirs, "Run output directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*synth) return report(airsim_cmd_synth(hours, synth_seed, synth_out.c_str()));

  if (*train) {
    airsim_train_options o{or_null(scenario), or_null(dataset), models.c_str(), print_line, nullptr};
    return report(airsim_cmd_train(&o));
  }

  if (*run) {
    airsim_run_options o{or_null(scenario), strategy.c_str(), seeds.c_str(), out.c_str(), models.c_str(),
                         or_null(dataset),  train_first ? 1 : 0, print_line, nullptr};
    return report(airsim_cmd_run(&o));
  }

  std::vector<const char*> ptrs;
  for (const auto& d : dirs) ptrs.push_back(d.c_str());
  char* table = nullptr;
  const auto s = airsim_cmd_compare(ptrs.data(), ptrs.size(), &table);
  if (s == AIRSIM_OK) {
    std::fputs(table, stdout);
    airsim_free_string(table);
  }
  return report(s);
}
