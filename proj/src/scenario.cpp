#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "airsim/core.hpp"
#include "airsim/error.hpp"
#include "airsim/text.hpp"

namespace airsim {

namespace {

struct Field {
  std::string key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

double to_double(std::string_view key, std::string_view v) {
  auto d = text::parse_double(v);
  if (!d || !std::isfinite(*d)) throw ValidationError(std::string(key), "expected a finite number, got '" + std::string(v) + "'");
  return *d;
}

int to_int(std::string_view key, std::string_view v) {
  auto i = text::parse_int(v);
  if (!i || *i < INT32_MIN || *i > INT32_MAX)
    throw ValidationError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  return static_cast<int>(*i);
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  auto i = text::parse_uint(v);
  if (!i) throw ValidationError(std::string(key), "expected a non-negative integer, got '" + std::string(v) + "'");
  return *i;
}

template <typename T>
Field number(std::string key, T ScenarioConfig::*member) {
  auto k = key;
  Field f{std::move(key), {}, {}};
  f.set = [k, member](ScenarioConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, double>) c.*member = to_double(k, v);
    else if constexpr (std::is_same_v<T, int>) c.*member = to_int(k, v);
    else c.*member = to_uint(k, v);
  };
  f.get = [member](const ScenarioConfig& c) {
    if constexpr (std::is_same_v<T, double>) return text::format_double(c.*member);
    else return std::to_string(c.*member);
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    for (Pollutant p : kEmittedPollutants) {
      const std::string key = std::string(key_of(p)) + "_sources";
      t.push_back({key,
                   [key, p](ScenarioConfig& c, std::string_view v) { c.source_counts[index_of(p)] = to_int(key, v); },
                   [p](const ScenarioConfig& c) { return std::to_string(c.source_counts[index_of(p)]); }});
    }
    t.push_back(number("max_emission_rate", &ScenarioConfig::max_emission_rate));
    for (Pollutant p : kAllPollutants) {
      const std::string key = "goal_" + std::string(key_of(p)) + "_level";
      t.push_back({key,
                   [key, p](ScenarioConfig& c, std::string_view v) {
                     if (text::trim(v) == "none") c.goal_levels[index_of(p)] = std::nullopt;
                     else c.goal_levels[index_of(p)] = to_double(key, v);
                   },
                   [p](const ScenarioConfig& c) {
                     const auto& g = c.goal_levels[index_of(p)];
                     return g ? text::format_double(*g) : std::string("none");
                   }});
    }
    t.push_back(number("goal_aq_index", &ScenarioConfig::goal_aq_index));
    t.push_back(number("memory_steps", &ScenarioConfig::memory_steps));
    t.push_back(number("initial_cooperator_proportion", &ScenarioConfig::initial_cooperator_proportion));
    t.push_back(number("box_count", &ScenarioConfig::box_count));
    t.push_back(number("initial_temperature", &ScenarioConfig::initial_temperature));
    t.push_back(number("initial_humidity", &ScenarioConfig::initial_humidity));
    t.push_back(number("initial_wind_speed", &ScenarioConfig::initial_wind_speed));
    t.push_back(number("initial_rainfall", &ScenarioConfig::initial_rainfall));
    for (Pollutant p : kAllPollutants) {
      const std::string key = "initial_" + std::string(key_of(p));
      t.push_back({key,
                   [key, p](ScenarioConfig& c, std::string_view v) { c.initial_concentrations[index_of(p)] = to_double(key, v); },
                   [p](const ScenarioConfig& c) { return text::format_double(c.initial_concentrations[index_of(p)]); }});
    }
    t.push_back(number("initial_aq_index", &ScenarioConfig::initial_aq_index));
    t.push_back(number("total_hours", &ScenarioConfig::total_hours));
    t.push_back(number("step_hours", &ScenarioConfig::step_hours));
    t.push_back(number("prediction_horizon", &ScenarioConfig::prediction_horizon));
    t.push_back({"strategy",
                 [](ScenarioConfig& c, std::string_view v) {
                   auto s = strategy_from_name(text::trim(v));
                   if (!s) throw ValidationError("strategy", "unknown strategy '" + std::string(v) +
                                                                 "' (valid: eg-cp, eg-ncp, eg-np, cs, nc)");
                   c.strategy = *s;
                 },
                 [](const ScenarioConfig& c) { return std::string(name_of(c.strategy)); }});
    t.push_back(number("payoff_b", &ScenarioConfig::payoff_b));
    t.push_back(number("payoff_c", &ScenarioConfig::payoff_c));
    t.push_back(number("seed", &ScenarioConfig::seed));
    t.push_back(number("action_step_fraction", &ScenarioConfig::action_step_fraction));
    t.push_back(number("initial_emission_fraction", &ScenarioConfig::initial_emission_fraction));
    t.push_back(number("stack_height_min", &ScenarioConfig::stack_height_min));
    t.push_back(number("stack_height_max", &ScenarioConfig::stack_height_max));
    t.push_back(number("wind_direction", &ScenarioConfig::wind_direction));
    t.push_back(number("dataset_seed", &ScenarioConfig::dataset_seed));
    t.push_back(number("dataset_hours", &ScenarioConfig::dataset_hours));
    t.push_back(number("max_centers", &ScenarioConfig::max_centers));
    t.push_back(number("impute_window", &ScenarioConfig::impute_window));
    return t;
  }();
  return table;
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

int ScenarioConfig::total_sources() const {
  int n = 0;
  for (int c : source_counts) n += c;
  return n;
}

std::vector<std::string> ScenarioConfig::warnings() const {
  std::vector<std::string> w;
  // N-person dilemma condition; the regulatory scenario violates it.
  const int n = *std::max_element(source_counts.begin(), source_counts.end());
  if (!(payoff_b > payoff_c && payoff_c > 0.0 && payoff_c > payoff_b / std::max(n, 1)))
    w.push_back("payoff constants b=" + text::format_double(payoff_b) + ", c=" + text::format_double(payoff_c) +
                " do not satisfy b > c > 0 and c > b/N; cooperation is not a dilemma under these values");
  return w;
}

void validate_scenario(const ScenarioConfig& c) {
  for (Pollutant p : kAllPollutants) {
    const auto n = c.source_counts[index_of(p)];
    if (p == Pollutant::O3) require(n == 0, "o3_sources", "O3 is secondary and cannot have sources");
    else require(n >= 0, "sources", "source counts must be >= 0");
    const auto& g = c.goal_levels[index_of(p)];
    if (g) require(std::isfinite(*g) && *g > 0.0, "goal level", "goal levels must be > 0");
    require(c.initial_concentrations[index_of(p)] >= 0.0, "initial concentration", "must be >= 0");
  }
  require(c.max_emission_rate > 0.0, "max_emission_rate", "must be > 0");
  require(c.goal_aq_index >= 1 && c.goal_aq_index <= 5, "goal_aq_index", "must be in 1..5");
  require(c.memory_steps >= 2, "memory_steps", "memory length must be >= 2");
  require(c.initial_cooperator_proportion >= 0.0 && c.initial_cooperator_proportion <= 1.0,
          "initial_cooperator_proportion", "must lie in [0, 1]");
  require(c.box_count >= 1, "box_count", "must be >= 1");
  require(c.initial_wind_speed > 0.0, "initial_wind_speed", "must be > 0");
  require(c.initial_humidity >= 0.0 && c.initial_humidity <= 100.0, "initial_humidity", "must be a percentage");
  require(c.initial_rainfall >= 0.0, "initial_rainfall", "must be >= 0");
  require(c.initial_aq_index >= 1 && c.initial_aq_index <= 5, "initial_aq_index", "must be in 1..5");
  require(c.step_hours >= 1, "step_hours", "must be >= 1");
  require(c.total_hours >= c.step_hours, "total_hours", "must be >= step_hours");
  require(c.total_hours % c.step_hours == 0, "step_hours", "step length must divide total_hours");
  require(c.prediction_horizon >= 1, "prediction_horizon", "must be >= 1");
  require(std::isfinite(c.payoff_b), "payoff_b", "must be finite");
  require(std::isfinite(c.payoff_c), "payoff_c", "must be finite");
  require(c.action_step_fraction > 0.0 && c.action_step_fraction < 1.0, "action_step_fraction", "must lie in (0, 1)");
  require(c.initial_emission_fraction >= 0.0 && c.initial_emission_fraction <= 1.0, "initial_emission_fraction",
          "must lie in [0, 1]");
  require(c.stack_height_min >= 0.0 && c.stack_height_min <= c.stack_height_max && c.stack_height_max < kBoxEdge,
          "stack_height_min", "need 0 <= stack_height_min <= stack_height_max < 1000");
  require(std::isfinite(c.wind_direction), "wind_direction", "must be finite");
  require(c.dataset_hours >= 48, "dataset_hours", "must be >= 48");
  require(c.dataset_hours > c.total_hours, "dataset_hours", "dataset must cover the simulated period");
  require(c.max_centers >= 1, "max_centers", "must be >= 1");
  require(c.impute_window >= 1, "impute_window", "must be >= 1");
}

ScenarioConfig validate_scenario(const RawConfig& raw) {
  ScenarioConfig config;
  for (const auto& [key, value] : raw) {
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ValidationError(key, "unknown scenario key");
    it->set(config, value);
  }
  validate_scenario(config);
  return config;
}

RawConfig parse_key_values(std::string_view content, std::string_view origin) {
  RawConfig raw;
  int line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ValidationError(where, "expected 'key = value'");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(where, "empty key");
    if (!raw.emplace(std::string(key), std::string(value)).second)
      throw ValidationError(std::string(key), "duplicate key at " + where);
  }
  return raw;
}

ScenarioConfig load_scenario(const std::string& path) {
  return validate_scenario(parse_key_values(text::read_file(path), path));
}

std::string to_text(const ScenarioConfig& config) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(config) << '\n';
  return out.str();
}

}  // namespace airsim
