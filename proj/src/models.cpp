#include <algorithm>
#include <filesystem>
#include <json.hpp>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/text.hpp"

namespace airsim::forecasting {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "airsim-model";

Column column_from_key(std::string_view key) {
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (key_of(static_cast<Column>(c)) == key) return static_cast<Column>(c);
  }
  throw ValidationError("inputs", "unknown column '" + std::string(key) + "'");
}

json header(const char* kind) { return {{"format", kFormat}, {"version", kModelFormatVersion}, {"kind", kind}}; }

void check_header(const json& j, const char* kind) {
  if (!j.is_object() || j.value("format", "") != kFormat) throw ValidationError("format", "not an airsim model file");
  if (j.value("version", -1) != kModelFormatVersion)
    throw ValidationError("version", "unsupported model version " + j.value("version", json()).dump());
  if (j.value("kind", "") != kind) throw ValidationError("kind", std::string("expected a ") + kind + " model");
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("json", e.what());
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string rbf_file(Pollutant p) { return "rbf_" + std::string(key_of(p)) + ".json"; }

}  // namespace

bool ForecastModels::complete() const {
  return mlp.has_value() && std::all_of(rbf.begin(), rbf.end(), [](const auto& m) { return m.has_value(); });
}

std::string to_json(const RbfModel& model, const RbfReport* report) {
  model.check();
  json j = header("rbf");
  j["pollutant"] = key_of(model.pollutant);
  j["horizon"] = model.horizon;
  json inputs = json::array(), ranges = json::array();
  for (std::size_t i = 0; i < model.inputs.size(); ++i) {
    inputs.push_back(key_of(model.inputs[i]));
    ranges.push_back({model.input_ranges[i].min, model.input_ranges[i].max});
  }
  j["inputs"] = inputs;
  j["input_ranges"] = ranges;
  j["target_range"] = model.target_range;
  j["width"] = model.width;
  j["bias"] = model.bias;
  j["linear"] = to_vector(model.linear);
  json centers = json::array();
  for (Eigen::Index k = 0; k < model.centers.rows(); ++k) centers.push_back(to_vector(model.centers.row(k).transpose()));
  j["centers"] = centers;
  j["weights"] = to_vector(model.weights);
  if (report) {
    j["report"] = {{"centers", report->centers},
                   {"validation_rmse", report->validation_rmse},
                   {"baseline_rmse", report->baseline_rmse},
                   {"training_rmse", report->training_rmse}};
  }
  return j.dump(1) + "\n";
}

std::string to_json(const MlpModel& model, double training_mse, double heldout_accuracy) {
  json j = header("mlp");
  j["layers"] = MlpModel::kLayers;
  j["co_scale"] = model.co_scale();
  j["parameters"] = to_vector(model.parameters());
  j["training_mse"] = training_mse;
  j["heldout_accuracy"] = heldout_accuracy;
  return j.dump(1) + "\n";
}

namespace {

RbfModel rbf_from(const json& j, RbfReport* report) {
  check_header(j, "rbf");
  try {
    RbfModel m;
    const auto key = j.at("pollutant").get<std::string>();
    const auto pollutant = pollutant_from_key(key);
    if (!pollutant) throw ValidationError("pollutant", "unknown pollutant '" + key + "'");
    m.pollutant = *pollutant;
    m.horizon = j.at("horizon").get<int>();
    for (const auto& k : j.at("inputs")) m.inputs.push_back(column_from_key(k.get<std::string>()));
    for (const auto& r : j.at("input_ranges")) m.input_ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    m.target_range = j.at("target_range").get<double>();
    m.width = j.at("width").get<double>();
    m.bias = j.at("bias").get<double>();
    m.linear = from_vector(j.at("linear").get<std::vector<double>>());
    const auto& centers = j.at("centers");
    m.centers.resize(static_cast<Eigen::Index>(centers.size()), static_cast<Eigen::Index>(m.inputs.size()));
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const auto row = centers[k].get<std::vector<double>>();
      if (row.size() != m.inputs.size()) throw ValidationError("centers", "center dimension mismatch");
      m.centers.row(static_cast<Eigen::Index>(k)) = from_vector(row).transpose();
    }
    m.weights = from_vector(j.at("weights").get<std::vector<double>>());
    m.check();
    if (report && j.contains("report")) {
      const auto& r = j["report"];
      report->pollutant = m.pollutant;
      report->centers = r.at("centers").get<std::size_t>();
      report->validation_rmse = r.at("validation_rmse").get<double>();
      report->baseline_rmse = r.at("baseline_rmse").get<double>();
      report->training_rmse = r.at("training_rmse").get<double>();
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError("rbf", e.what());
  } catch (const DomainError& e) {
    throw ValidationError("rbf", e.what());
  }
}

MlpModel mlp_from(const json& j, double* mse, double* accuracy) {
  check_header(j, "mlp");
  try {
    if (j.at("layers").get<std::vector<int>>() != std::vector<int>(MlpModel::kLayers.begin(), MlpModel::kLayers.end()))
      throw ValidationError("layers", "unsupported topology");
    MlpModel m(from_vector(j.at("parameters").get<std::vector<double>>()), j.at("co_scale").get<double>());
    if (mse) *mse = j.value("training_mse", 0.0);
    if (accuracy) *accuracy = j.value("heldout_accuracy", 0.0);
    return m;
  } catch (const json::exception& e) {
    throw ValidationError("mlp", e.what());
  } catch (const DomainError& e) {
    throw ValidationError("mlp", e.what());
  }
}

}  // namespace

RbfModel rbf_from_json(std::string_view text) { return rbf_from(parse(text), nullptr); }

MlpModel mlp_from_json(std::string_view text) { return mlp_from(parse(text), nullptr, nullptr); }

std::vector<std::string> model_file_names() {
  std::vector<std::string> names;
  for (Pollutant p : kAllPollutants) names.push_back(rbf_file(p));
  names.emplace_back("mlp.json");
  names.emplace_back("report.csv");
  return names;
}

void save_models(const ForecastModels& models, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, ec.message());
  const std::filesystem::path root(dir);
  std::string report = "model,centers,validation_rmse,baseline_rmse,training_rmse\n";
  for (Pollutant p : kAllPollutants) {
    const auto& m = models.rbf[index_of(p)];
    if (!m) continue;
    const RbfReport* r = nullptr;
    for (const auto& rep : models.reports) {
      if (rep.pollutant == p) r = &rep;
    }
    text::write_file((root / rbf_file(p)).string(), to_json(*m, r));
    if (r) {
      report += "rbf_" + std::string(key_of(p)) + "," + std::to_string(r->centers) + "," +
                text::format_double(r->validation_rmse) + "," + text::format_double(r->baseline_rmse) + "," +
                text::format_double(r->training_rmse) + "\n";
    }
  }
  if (models.mlp)
    text::write_file((root / "mlp.json").string(),
                     to_json(*models.mlp, models.mlp_training_mse, models.mlp_heldout_accuracy));
  text::write_file((root / "report.csv").string(), report);
}

ForecastModels load_models(const std::string& dir) {
  const std::filesystem::path root(dir);
  ForecastModels out;
  for (Pollutant p : kAllPollutants) {
    const auto path = (root / rbf_file(p)).string();
    if (!std::filesystem::exists(path)) throw IoError(path, "model file missing; run `airsim train` first");
    RbfReport report;
    try {
      out.rbf[index_of(p)] = rbf_from(parse(text::read_file(path)), &report);
    } catch (const ValidationError& e) {
      throw ValidationError(path, e.what());
    }
    if (out.rbf[index_of(p)]->pollutant != p) throw ValidationError(path, "model is for another pollutant");
    if (report.centers > 0) out.reports.push_back(report);
  }
  const auto path = (root / "mlp.json").string();
  if (!std::filesystem::exists(path)) throw IoError(path, "model file missing; run `airsim train` first");
  try {
    out.mlp = mlp_from(parse(text::read_file(path)), &out.mlp_training_mse, &out.mlp_heldout_accuracy);
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.what());
  }
  return out;
}

}  // namespace airsim::forecasting
