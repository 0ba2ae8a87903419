#include "airsim/commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <json.hpp>
#include <map>

#include "airsim/engine.hpp"
#include "airsim/error.hpp"
#include "airsim/output.hpp"
#include "airsim/text.hpp"

namespace airsim::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void say(const Log& log, const std::string& line) {
  if (log) log(line);
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
}

std::string strategy_list() {
  std::string s;
  for (Strategy st : kAllStrategies) {
    if (!s.empty()) s += ", ";
    s += name_of(st);
  }
  return s;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (auto part : text::split(text, ',')) {
    part = text::trim(part);
    const auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      auto v = text::parse_uint(part);
      if (!v) throw ValidationError("seeds", "bad seed '" + std::string(part) + "'");
      seeds.push_back(*v);
      continue;
    }
    auto lo = text::parse_uint(part.substr(0, dash));
    auto hi = text::parse_uint(part.substr(dash + 1));
    if (!lo || !hi || *hi < *lo) throw ValidationError("seeds", "bad seed range '" + std::string(part) + "'");
    if (*hi - *lo >= 100000) throw ValidationError("seeds", "seed range too large");
    for (auto s = *lo; s <= *hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ValidationError("seeds", "no seeds given");
  return seeds;
}

std::vector<Strategy> parse_strategies(std::string_view text) {
  if (text == "all") return {kAllStrategies.begin(), kAllStrategies.end()};
  if (auto s = strategy_from_name(text)) return {*s};
  throw ValidationError("strategy", "unknown strategy '" + std::string(text) + "'; expected one of " +
                                        strategy_list() + " or all");
}

ScenarioConfig scenario_or_default(const std::string& path) {
  if (path.empty()) {
    ScenarioConfig c;
    validate_scenario(c);
    return c;
  }
  return load_scenario(path);
}

forecasting::TimeSeriesDataset dataset_for(const ScenarioConfig& config, const std::string& path) {
  if (!path.empty()) return forecasting::load_csv(path, config.impute_window);
  return forecasting::synthesize_dataset(forecasting::regional_stats(), static_cast<std::size_t>(config.dataset_hours),
                                         config.dataset_seed);
}

void synth(const SynthOptions& options) {
  if (options.out.empty()) throw ValidationError("out", "output path required");
  if (options.hours < 48) throw ValidationError("hours", "need at least 48 hourly rows");
  const auto data = forecasting::synthesize_dataset(forecasting::regional_stats(), options.hours, options.seed);
  const fs::path out(options.out);
  if (out.has_parent_path()) make_dirs(out.parent_path());
  forecasting::save_csv(data, options.out);
}

forecasting::ForecastModels train(const TrainOptions& options) {
  const auto config = scenario_or_default(options.scenario);
  const auto data = dataset_for(config, options.dataset);
  forecasting::ForecastModels models;
  forecasting::RbfOptions rbf;
  rbf.max_centers = static_cast<std::size_t>(config.max_centers);
  std::vector<std::string> failed;
  for (Pollutant p : kAllPollutants) {
    try {
      auto fit = forecasting::train_rbf(data, p, config.prediction_horizon, rbf);
      say(options.log, std::string(name_of(p)) + ": " + std::to_string(fit.report.centers) + " centers, validation RMSE " +
                           text::format_double(fit.report.validation_rmse) + ", persistence RMSE " +
                           text::format_double(fit.report.baseline_rmse));
      models.rbf[index_of(p)] = std::move(fit.model);
      models.reports.push_back(fit.report);
    } catch (const DomainError& e) {
      say(options.log, std::string(name_of(p)) + ": training failed: " + e.what());
      failed.emplace_back(name_of(p));
    }
  }
  std::optional<TrainingError> mlp_error;
  try {
    auto fit = forecasting::train_mlp();
    say(options.log, "MLP: training MSE " + text::format_double(fit.training_mse) + ", held-out accuracy " +
                         text::format_double(fit.heldout_accuracy));
    models.mlp = fit.model;
    models.mlp_training_mse = fit.training_mse;
    models.mlp_heldout_accuracy = fit.heldout_accuracy;
  } catch (const TrainingError& e) {
    say(options.log, std::string("MLP: ") + e.what());
    mlp_error = e;
  }
  forecasting::save_models(models, options.models);
  if (mlp_error) throw *mlp_error;
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    throw TrainingError("RBF training failed for " + names, 0.0, 0.0);
  }
  return models;
}

namespace {

std::string hash_file(const std::string& path) { return text::sha256_hex(text::read_file(path)); }

void write_manifest(const RunOptions& o, const ScenarioConfig& config, const std::vector<Strategy>& strategies,
                    const std::vector<std::uint64_t>& seeds) {
  json inputs = json::object();
  if (!o.scenario.empty()) inputs[o.scenario] = hash_file(o.scenario);
  if (!o.dataset.empty()) inputs[o.dataset] = hash_file(o.dataset);
  for (const auto& name : forecasting::model_file_names()) {
    const auto path = (fs::path(o.models) / name).string();
    if (fs::exists(path)) inputs[path] = hash_file(path);
  }
  json names = json::array();
  for (auto s : strategies) names.push_back(name_of(s));
  json m = {{"tool", "airsim"},
            {"version", AIRSIM_VERSION},
            {"scenario_path", o.scenario.empty() ? "(defaults)" : o.scenario},
            {"scenario_sha256", text::sha256_hex(to_text(config))},
            {"strategies", names},
            {"seeds", seeds},
            {"out", o.out},
            {"models", o.models},
            {"dataset", o.dataset.empty() ? "(synthetic)" : o.dataset},
            {"inputs", inputs}};
  text::write_file((fs::path(o.out) / "manifest.json").string(), m.dump(2) + "\n");
}

struct Summary {
  Strategy strategy;
  std::size_t runs = 0;
  double mean_final_aq = 0.0;
  double mean_aq = 0.0;
  std::array<double, 5> histogram{};
  std::size_t goal_reached = 0;
  std::optional<double> mean_equilibrium_step;
  double equilibrium_cooperation = 0.0;
};

constexpr std::string_view kSummaryHeader =
    "strategy,runs,mean_final_aq_index,mean_aq_index,aq_1,aq_2,aq_3,aq_4,aq_5,goal_reached,mean_equilibrium_step,"
    "equilibrium_cooperation";

std::string summary_row(const Summary& s) {
  using text::format_double;
  std::string out = std::string(name_of(s.strategy)) + "," + std::to_string(s.runs) + "," +
                    format_double(s.mean_final_aq) + "," + format_double(s.mean_aq);
  for (double h : s.histogram) out += "," + format_double(h);
  out += "," + std::to_string(s.goal_reached) + ",";
  if (s.mean_equilibrium_step) out += format_double(*s.mean_equilibrium_step);
  out += "," + format_double(s.equilibrium_cooperation) + "\n";
  return out;
}

}  // namespace

void run(const RunOptions& o) {
  const auto config = scenario_or_default(o.scenario);
  for (const auto& w : config.warnings()) say(o.log, "warning: " + w);
  const auto strategies = parse_strategies(o.strategy);
  const auto seeds = parse_seeds(o.seeds);
  if (o.out.empty()) throw ValidationError("out", "output directory required");

  if (o.train_first) {
    TrainOptions t{o.scenario, o.dataset, o.models, o.log};
    train(t);
  }
  const auto models = forecasting::load_models(o.models);
  const auto data = dataset_for(config, o.dataset);

  const fs::path root(o.out);
  make_dirs(root);
  write_manifest(o, config, strategies, seeds);

  std::string metrics(output::kMetricsHeader);
  metrics += '\n';
  std::string summary(kSummaryHeader);
  summary += '\n';
  std::vector<std::pair<Strategy, output::Table>> series;
  for (Strategy st : strategies) {
    const fs::path dir = root / name_of(st);
    std::vector<engine::Trajectory> runs;
    Summary sum;
    sum.strategy = st;
    double eq_steps = 0.0;
    std::size_t eq_count = 0;
    for (auto seed : seeds) {
      auto tr = engine::run(config, st, seed, models, data);
      const auto m = engine::compute_metrics(tr);
      const fs::path seed_dir = dir / ("seed_" + std::to_string(seed));
      make_dirs(seed_dir);
      text::write_file((seed_dir / "trajectory.csv").string(), output::trajectory_csv(tr));
      const auto row = output::metrics_row(st, seed, m);
      text::write_file((seed_dir / "metrics.csv").string(), std::string(output::kMetricsHeader) + "\n" + row);
      metrics += row;
      say(o.log, std::string(name_of(st)) + " seed " + std::to_string(seed) + ": final AQ index " +
                     std::to_string(m.final_aq_index) + ", equilibrium cooperation " +
                     text::format_double(m.equilibrium_cooperation));

      ++sum.runs;
      sum.mean_final_aq += m.final_aq_index;
      sum.mean_aq += m.mean_aq_index;
      for (std::size_t i = 0; i < 5; ++i) sum.histogram[i] += m.aq_histogram[i];
      sum.goal_reached += m.final_aq_index <= config.goal_aq_index ? 1 : 0;
      if (m.equilibrium_step) {
        eq_steps += *m.equilibrium_step;
        ++eq_count;
      }
      sum.equilibrium_cooperation += m.equilibrium_cooperation;
      runs.push_back(std::move(tr));
    }
    const double n = static_cast<double>(sum.runs);
    sum.mean_final_aq /= n;
    sum.mean_aq /= n;
    for (auto& h : sum.histogram) h /= n;
    sum.equilibrium_cooperation /= n;
    if (eq_count) sum.mean_equilibrium_step = eq_steps / static_cast<double>(eq_count);
    summary += summary_row(sum);

    const auto series_path = (dir / "series.csv").string();
    text::write_file(series_path, output::mean_series_csv(runs));
    // Charts are drawn from the CSV on disk.
    auto table = output::parse_table(text::read_file(series_path), series_path);
    text::write_file((dir / "aq_index.svg").string(), output::aq_chart(table));
    text::write_file((dir / "concentrations.svg").string(), output::concentration_chart(table));
    text::write_file((dir / "cooperation.svg").string(), output::cooperation_chart(table));
    series.emplace_back(st, std::move(table));
  }
  text::write_file((root / "metrics.csv").string(), metrics);
  text::write_file((root / "summary.csv").string(), summary);

  if (series.size() > 1) {
    std::vector<output::Series> aq, coop;
    for (const auto& [st, t] : series) {
      aq.push_back({std::string(name_of(st)), t.numbers("hour"), t.numbers("aq_index")});
      coop.push_back({std::string(name_of(st)), t.numbers("hour"), t.numbers("coop_all")});
    }
    text::write_file((root / "comparison_aq.svg").string(),
                     output::line_chart("Air-quality index by strategy (mean over seeds)", "hour", "index", aq));
    text::write_file((root / "comparison_cooperation.svg").string(),
                     output::line_chart("Cooperating agents by strategy (mean over seeds)", "hour", "proportion", coop));
  }
}

std::string compare(const std::vector<std::string>& dirs) {
  if (dirs.size() < 2) throw ValidationError("compare", "need two runs (got " + std::to_string(dirs.size()) + ")");
  struct Row {
    std::string strategy, dir;
    double final_aq, mean_aq, coop;
    std::array<double, 5> hist;
    std::string eq_step, goal, runs;
  };
  std::vector<Row> rows;
  std::optional<std::string> hash;
  for (const auto& d : dirs) {
    const auto manifest_path = (fs::path(d) / "manifest.json").string();
    json m;
    try {
      m = json::parse(text::read_file(manifest_path));
    } catch (const json::exception& e) {
      throw ValidationError(manifest_path, e.what());
    }
    const auto h = m.value("scenario_sha256", "");
    if (hash && *hash != h)
      throw ValidationError("compare", "scenario of " + d + " differs from " + dirs.front() + "; refusing to compare");
    hash = h;
    const auto summary_path = (fs::path(d) / "summary.csv").string();
    const auto t = output::parse_table(text::read_file(summary_path), summary_path);
    const auto final_aq = t.numbers("mean_final_aq_index");
    const auto mean_aq = t.numbers("mean_aq_index");
    const auto coop = t.numbers("equilibrium_cooperation");
    std::array<std::vector<double>, 5> hist;
    for (std::size_t i = 0; i < 5; ++i) hist[i] = t.numbers("aq_" + std::to_string(i + 1));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Row row{t.rows[r][t.index("strategy")], d, final_aq[r], mean_aq[r], coop[r], {}, t.rows[r][t.index("mean_equilibrium_step")],
              t.rows[r][t.index("goal_reached")], t.rows[r][t.index("runs")]};
      for (std::size_t i = 0; i < 5; ++i) row.hist[i] = hist[i][r];
      rows.push_back(std::move(row));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.final_aq != b.final_aq) return a.final_aq < b.final_aq;
    if (a.mean_aq != b.mean_aq) return a.mean_aq < b.mean_aq;
    return a.coop > b.coop;
  });

  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  auto num = [](double v, int digits) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    return ec == std::errc() ? std::string(buf.data(), end) : std::string("?");
  };
  std::string out = "rank  strategy  runs  final_aq  mean_aq     aq_1     aq_2     aq_3     aq_4     aq_5  goal  "
                    "eq_step  eq_coop  dir\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += pad(std::to_string(i + 1), 4) + "  " + pad(r.strategy, 8) + "  " + pad(r.runs, 4) + "  " +
           pad(num(r.final_aq, 3), 8) + "  " + pad(num(r.mean_aq, 3), 7);
    for (double h : r.hist) out += "  " + pad(num(h, 1), 7);
    out += "  " + pad(r.goal, 4) + "  " + pad(r.eq_step.empty() ? "-" : num(*text::parse_double(r.eq_step), 1), 7) +
           "  " + pad(num(r.coop, 3), 7) + "  " + r.dir + "\n";
  }
  return out;
}

}  // namespace airsim::commands
