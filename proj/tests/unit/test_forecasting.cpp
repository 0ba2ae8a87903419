#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/random.hpp"

using namespace airsim;
using namespace airsim::forecasting;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

// Climate drawn at random; PM10 two hours later is an exact affine function
// of the climate now.
TimeSeriesDataset linear_dataset(std::size_t rows) {
  TimeSeriesDataset d;
  Rng rng(12);
  for (auto& c : d.columns) c.resize(rows);
  for (auto& c : d.imputed) c.assign(rows, false);
  for (std::size_t r = 0; r < rows; ++r) {
    d.timestamps.push_back(static_cast<std::int64_t>(r) * 3600);
    d.columns[index_of(Column::WindSpeed)][r] = rng.uniform(0.5, 6);
    d.columns[index_of(Column::Temperature)][r] = rng.uniform(0, 35);
    d.columns[index_of(Column::Humidity)][r] = rng.uniform(20, 95);
    d.columns[index_of(Column::Rainfall)][r] = rng.uniform(0, 2);
    for (Column c : {Column::SOx, Column::NOx, Column::CO, Column::O3}) d.columns[index_of(c)][r] = rng.uniform(1, 50);
  }
  auto& pm = d.columns[index_of(Column::PM10)];
  pm[0] = 30;
  pm[1] = 31;
  for (std::size_t r = 2; r < rows; ++r)
    pm[r] = 10 + 3 * d.columns[index_of(Column::Temperature)][r - 2] + 2 * d.columns[index_of(Column::WindSpeed)][r - 2];
  return d;
}

}  // namespace

TEST_SUITE("forecasting") {
  TEST_CASE("normalize") {
    CHECK(normalize(v({0, 5, 10})) == v({0, 0.5, 1.0}));
    CHECK(normalize(v({2, 4})) == v({1.0, 2.0}));
    CHECK_THROWS_AS(normalize(v({3, 3, 3})), DomainError);
    const auto x = v({4, 9, 1.5, 7});
    const auto back = denormalize(normalize(x), 7.5);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-14));
  }

  TEST_CASE("impute") {
    const double gap = std::nan("");
    auto r = impute(v({1, gap, 3}), 1);
    CHECK(r.values == v({1, 2, 3}));
    CHECK(r.imputed == std::vector<bool>{false, true, false});
    CHECK(impute(v({gap, 2, 2}), 1).values == v({2, 2, 2}));
    CHECK(impute(v({1, -5, 3}), 1).values == v({1, 2, 3}));
    CHECK(impute(v({1, 2, gap, 6, 8}), 2).values[2] == doctest::Approx(4.25));
    CHECK_THROWS_AS(impute(v({gap, -1}), 1), DomainError);
  }

  TEST_CASE("rmse") {
    CHECK(rmse(v({1, 2}), v({1, 2})) == 0.0);
    CHECK(rmse(v({1, 1}), v({0, 0})) == doctest::Approx(1.0));
    CHECK(rmse(v({3}), v({0})) == doctest::Approx(3.0));
    CHECK_THROWS_AS(rmse(v({1}), v({1, 2})), DomainError);
  }

  TEST_CASE("csv round trip and line-numbered errors") {
    const auto d = synthesize_dataset(regional_stats(), 60, 3);
    const auto text = to_csv(d);
    const auto back = parse_csv(text, 3);
    CHECK(back.rows() == 60);
    CHECK(to_csv(back) == text);

    auto lines = text;
    const auto third = lines.find('\n', lines.find('\n') + 1) + 1;
    lines.insert(third, "7200,1,2\n");
    try {
      parse_csv(lines, 3, "data.csv");
      FAIL("accepted a short row");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("data.csv:3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv("nonsense\n", 3), ValidationError);
  }

  TEST_CASE("synthetic data") {
    const auto a = synthesize_dataset(regional_stats(), 17520, 2003);
    const auto b = synthesize_dataset(regional_stats(), 17520, 2003);
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_csv(synthesize_dataset(regional_stats(), 200, 2004)) != to_csv(synthesize_dataset(regional_stats(), 200, 2003)));
    a.check();
    const auto& pm = a.column(Column::PM10);
    const double mean = std::accumulate(pm.begin(), pm.end(), 0.0) / static_cast<double>(pm.size());
    double var = 0;
    for (double x : pm) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(pm.size()));
    CHECK(mean == doctest::Approx(51.70).epsilon(0.10));
    CHECK(sd == doctest::Approx(51.66).epsilon(0.10));
    CHECK(a.range(Column::Temperature).max <= 42.1);
    for (const auto& col : a.columns)
      for (double x : col) REQUIRE(x >= 0.0);
    CHECK_THROWS_AS(synthesize_dataset(regional_stats(), 47, 1), DomainError);
  }

  TEST_CASE("rbf inputs") {
    CHECK(rbf_inputs(Pollutant::NOx) == std::vector<Column>{Column::WindSpeed, Column::Temperature, Column::Humidity,
                                                             Column::Rainfall, Column::NOx});
    const auto o3 = rbf_inputs(Pollutant::O3);
    CHECK(o3.size() == 6);
    CHECK(std::find(o3.begin(), o3.end(), Column::SOx) != o3.end());
    CHECK(std::find(o3.begin(), o3.end(), Column::CO) != o3.end());
    CHECK(std::find(o3.begin(), o3.end(), Column::O3) == o3.end());
  }

  TEST_CASE("kernel at its own center") {
    RbfModel m;
    m.inputs = rbf_inputs(Pollutant::PM10);
    m.input_ranges.assign(5, ColumnRange{0.0, 1.0});
    m.target_range = 40.0;
    m.width = 0.7;
    m.centers = Eigen::MatrixXd(1, 5);
    m.centers << 0.1, 0.2, 0.3, 0.4, 0.5;
    m.weights = Eigen::VectorXd::Constant(1, 1.0);
    m.linear = Eigen::VectorXd::Zero(5);
    CHECK(predict_pollutant(m, v({0.1, 0.2, 0.3, 0.4, 0.5})) == doctest::Approx(40.0));
    CHECK_THROWS_AS(predict_pollutant(m, v({0.1, 0.2})), DomainError);
  }

  TEST_CASE("rbf on a noiseless linear target") {
    const auto d = linear_dataset(800);
    RbfOptions o;
    o.max_centers = 50;
    const auto fit = train_rbf(d, Pollutant::PM10, 2, o);
    CHECK(fit.report.validation_rmse / fit.model.target_range < 0.05);
    CHECK(fit.report.validation_rmse <= fit.report.baseline_rmse);

    o.max_centers = 1;
    CHECK(train_rbf(d, Pollutant::PM10, 2, o).model.center_count() == 1);
    CHECK_THROWS_AS(train_rbf(linear_dataset(15), Pollutant::PM10, 2, o), DomainError);
  }

  TEST_CASE("rbf on synthetic data") {
    const auto d = synthesize_dataset(regional_stats(), 3000, 5);
    RbfOptions o;
    o.max_centers = 15;
    const auto fit = train_rbf(d, Pollutant::O3, 2, o);
    CHECK(fit.model.input_dim() == 6);
    CHECK(fit.report.validation_rmse <= persistence_rmse(d, Pollutant::O3, 2));
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> f(6);
      for (auto& x : f) x = rng.uniform(-50, 500);
      REQUIRE(predict_pollutant(fit.model, f) >= 0.0);
    }
    const auto back = rbf_from_json(to_json(fit.model, &fit.report));
    std::vector<double> f{2, 15, 60, 0, 10, 0.5};
    CHECK(predict_pollutant(back, f) == predict_pollutant(fit.model, f));
  }

  TEST_CASE("mlp gradient matches finite differences") {
    Rng rng(21);
    Eigen::VectorXd p(MlpModel::kParameterCount);
    for (auto& x : p) x = rng.normal();
    MlpModel m(p);
    Eigen::Matrix<double, 5, 1> x;
    for (auto& e : x) e = rng.uniform();
    Eigen::VectorXd g(MlpModel::kParameterCount);
    const double y = m.forward(x, g);
    CHECK(y == doctest::Approx(m.forward(x)).epsilon(1e-14));
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      auto up = p, dn = p;
      up[i] += h;
      dn[i] -= h;
      const double fd = (MlpModel(up).forward(x) - MlpModel(dn).forward(x)) / (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }

  TEST_CASE("mlp encoding and prediction") {
    MlpModel m;
    CHECK(m.parameters().size() == 101);
    PerPollutant<double> c{};
    c[index_of(Pollutant::CO)] = 30;
    CHECK(m.encode(c)[index_of(Pollutant::CO)] == doctest::Approx(1.0));
    const int q = predict_air_quality(m, c);
    CHECK(q >= 1);
    CHECK(q <= 5);
    c[index_of(Pollutant::SOx)] = -1;
    CHECK_THROWS_AS(predict_air_quality(m, c), DomainError);
    CHECK(heldout_grid().size() == 10000);
    for (const auto& s : sample_labelled(500, 4)) CHECK(s.label == classify_air_quality(s.concentrations));
  }

  TEST_CASE("mlp training") {
    MlpOptions o;
    o.samples = 600;
    o.max_epochs = 300;
    const auto fit = train_mlp(o);
    CHECK(fit.training_mse < 0.05);
    for (std::size_t i = 1; i < fit.loss_history.size(); ++i) CHECK(fit.loss_history[i] <= fit.loss_history[i - 1]);
    CHECK(predict_air_quality(fit.model, PerPollutant<double>{}) == 1);
    PerPollutant<double> band1{10, 5, 10, 0.3, 5};
    CHECK(predict_air_quality(fit.model, band1) == 1);

    const auto back = mlp_from_json(to_json(fit.model, fit.training_mse, fit.heldout_accuracy));
    CHECK(back.parameters() == fit.model.parameters());

    MlpOptions hopeless = o;
    hopeless.max_epochs = 1;
    hopeless.restarts = 1;
    hopeless.target_mse = 1e-9;
    CHECK_THROWS_AS(train_mlp(hopeless), TrainingError);
  }
}
