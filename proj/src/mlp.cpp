#include <algorithm>
#include <cmath>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"
#include "airsim/random.hpp"

namespace airsim::forecasting {

namespace {

// Parameter layout: W1 (5x5, row-major), b1, W2 (10x5), b2, W3 (1x10), b3.
constexpr int kIn = 5, kH1 = 5, kH2 = 10;
constexpr int kW1 = 0, kB1 = kW1 + kH1 * kIn, kW2 = kB1 + kH1, kB2 = kW2 + kH2 * kH1, kW3 = kB2 + kH2,
              kB3 = kW3 + kH2;
static_assert(kB3 + 1 == static_cast<int>(MlpModel::kParameterCount));

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

MlpModel::MlpModel() : params_(Eigen::VectorXd::Zero(kParameterCount)), co_scale_(12.2) {}

MlpModel::MlpModel(const Eigen::VectorXd& parameters, double co_scale) : co_scale_(co_scale) {
  if (!(co_scale > 0.0)) throw DomainError("mlp: CO scale must be > 0");
  set_parameters(parameters);
}

void MlpModel::set_parameters(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != kParameterCount)
    throw DomainError("mlp: expected " + std::to_string(kParameterCount) + " parameters");
  if (!p.allFinite()) throw DomainError("mlp: non-finite parameter");
  params_ = p;
}

Eigen::Matrix<double, 5, 1> MlpModel::encode(const PerPollutant<double>& c) const {
  const auto& bands = AqBands::standard();
  Eigen::Matrix<double, 5, 1> x;
  for (Pollutant p : kAllPollutants) {
    const double v = c[index_of(p)];
    if (!(v >= 0.0)) throw DomainError("mlp: concentration must be a nonnegative number");
    x[static_cast<Eigen::Index>(index_of(p))] = AqBands::is_classified(p)
                                                    ? bands.band_coordinate(p, v) / AqBands::kBands
                                                    : std::min(v, co_scale_) / co_scale_;
  }
  return x;
}

double MlpModel::forward(const Eigen::Matrix<double, 5, 1>& x) const {
  const auto w1 = Eigen::Map<const RowMat>(params_.data() + kW1, kH1, kIn);
  const auto w2 = Eigen::Map<const RowMat>(params_.data() + kW2, kH2, kH1);
  const Eigen::VectorXd h1 = (w1 * x + params_.segment(kB1, kH1)).unaryExpr(&logistic);
  const Eigen::VectorXd h2 = (w2 * h1 + params_.segment(kB2, kH2)).unaryExpr(&logistic);
  return params_.segment(kW3, kH2).dot(h2) + params_[kB3];
}

double MlpModel::forward(const Eigen::Matrix<double, 5, 1>& x, Eigen::Ref<Eigen::VectorXd> g) const {
  if (static_cast<std::size_t>(g.size()) != kParameterCount) throw DomainError("mlp: gradient size mismatch");
  const auto w1 = Eigen::Map<const RowMat>(params_.data() + kW1, kH1, kIn);
  const auto w2 = Eigen::Map<const RowMat>(params_.data() + kW2, kH2, kH1);
  const Eigen::VectorXd h1 = (w1 * x + params_.segment(kB1, kH1)).unaryExpr(&logistic);
  const Eigen::VectorXd h2 = (w2 * h1 + params_.segment(kB2, kH2)).unaryExpr(&logistic);
  const auto w3 = params_.segment(kW3, kH2);

  const Eigen::VectorXd d2 = w3.cwiseProduct(h2.cwiseProduct((1.0 - h2.array()).matrix()));
  const Eigen::VectorXd d1 = (w2.transpose() * d2).cwiseProduct(h1.cwiseProduct((1.0 - h1.array()).matrix()));
  Eigen::Map<RowMat>(g.data() + kW1, kH1, kIn) = d1 * x.transpose();
  g.segment(kB1, kH1) = d1;
  Eigen::Map<RowMat>(g.data() + kW2, kH2, kH1) = d2 * h1.transpose();
  g.segment(kB2, kH2) = d2;
  g.segment(kW3, kH2) = h2;
  g[kB3] = 1.0;
  return w3.dot(h2) + params_[kB3];
}

int predict_air_quality(const MlpModel& model, const PerPollutant<double>& forecasts) {
  const double y = model.forward(model.encode(forecasts));
  if (!std::isfinite(y)) return AqBands::kBands;
  return static_cast<int>(std::clamp(std::round(y), 1.0, static_cast<double>(AqBands::kBands)));
}

std::vector<LabelledSample> sample_labelled(std::size_t count, std::uint64_t seed, double margin) {
  if (!(margin >= 0.0 && margin < 0.5)) throw DomainError("sampling margin must lie in [0, 0.5)");
  const auto& bands = AqBands::standard();
  Rng rng(seed);
  std::vector<LabelledSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int q = 1 + static_cast<int>(rng.below(AqBands::kBands));
    const auto lead = AqBands::kClassified[rng.below(AqBands::kClassified.size())];
    LabelledSample s;
    for (Pollutant p : AqBands::kClassified) {
      const double coord = p == lead ? rng.uniform(q - 1 + margin, q - margin) : rng.uniform(0.0, q - margin);
      s.concentrations[index_of(p)] = bands.concentration_at(p, coord);
    }
    s.concentrations[index_of(Pollutant::CO)] = rng.uniform(0.0, 12.2);
    s.label = classify_air_quality(s.concentrations, bands);
    out.push_back(s);
  }
  return out;
}

std::vector<LabelledSample> heldout_grid() {
  const auto& bands = AqBands::standard();
  PerPollutant<std::array<double, 10>> levels{};
  for (Pollutant p : AqBands::kClassified) {
    for (int b = 0; b < AqBands::kBands; ++b) {
      levels[index_of(p)][2 * b] = bands.concentration_at(p, b + 0.25);
      levels[index_of(p)][2 * b + 1] = bands.concentration_at(p, b + 0.75);
    }
  }
  std::vector<LabelledSample> grid;
  grid.reserve(10000);
  const auto& [s0, s1, s2, s3] = AqBands::kClassified;
  for (double a : levels[index_of(s0)])
    for (double b : levels[index_of(s1)])
      for (double c : levels[index_of(s2)])
        for (double d : levels[index_of(s3)]) {
          LabelledSample s;
          s.concentrations[index_of(s0)] = a;
          s.concentrations[index_of(s1)] = b;
          s.concentrations[index_of(s2)] = c;
          s.concentrations[index_of(s3)] = d;
          s.label = classify_air_quality(s.concentrations, bands);
          grid.push_back(s);
        }
  return grid;
}

namespace {

double accuracy(const MlpModel& m, std::span<const LabelledSample> samples) {
  std::size_t hits = 0;
  for (const auto& s : samples) hits += predict_air_quality(m, s.concentrations) == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

struct Restart {
  Eigen::VectorXd params;
  double mse = 0.0;
  std::size_t epochs = 0;
  std::vector<double> history;
};

Restart levenberg_marquardt(MlpModel& model, const std::vector<Eigen::Matrix<double, 5, 1>>& x,
                            const Eigen::VectorXd& y, std::size_t max_epochs) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto np = static_cast<Eigen::Index>(MlpModel::kParameterCount);
  Eigen::MatrixXd jac(n, np);
  Eigen::VectorXd err(n);
  auto residuals = [&](const MlpModel& m) {
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) e[i] = m.forward(x[static_cast<std::size_t>(i)]) - y[i];
    return e;
  };

  double mu = 1e-3;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd g(np);
    err[i] = model.forward(x[static_cast<std::size_t>(i)], g) - y[i];
    jac.row(i) = g.transpose();
  }
  double loss = err.squaredNorm() / static_cast<double>(n);
  Restart r{model.parameters(), loss, 0, {loss}};

  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jte = jac.transpose() * err;
    bool accepted = false;
    while (mu < 1e10) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += mu;
      const Eigen::VectorXd delta = a.ldlt().solve(-jte);
      Eigen::VectorXd trial = model.parameters() + delta;
      if (trial.allFinite()) {
        MlpModel candidate(trial, model.co_scale());
        const Eigen::VectorXd e = residuals(candidate);
        const double l = e.squaredNorm() / static_cast<double>(n);
        if (l < loss) {
          model.set_parameters(trial);
          loss = l;
          mu = std::max(mu / 10.0, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 10.0;
    }
    if (!accepted) break;
    r.history.push_back(loss);
    r.epochs = epoch + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd g(np);
      err[i] = model.forward(x[static_cast<std::size_t>(i)], g) - y[i];
      jac.row(i) = g.transpose();
    }
  }
  r.params = model.parameters();
  r.mse = loss;
  return r;
}

}  // namespace

MlpFit train_mlp(const MlpOptions& options) {
  const auto samples = sample_labelled(options.samples, options.seed);
  return train_mlp(samples, options);
}

MlpFit train_mlp(std::span<const LabelledSample> samples, const MlpOptions& options) {
  if (samples.empty()) throw DomainError("mlp: no training samples");
  if (options.restarts < 1) throw DomainError("mlp: restarts must be >= 1");
  MlpModel model;
  std::vector<Eigen::Matrix<double, 5, 1>> x;
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x.push_back(model.encode(samples[i].concentrations));
    y[static_cast<Eigen::Index>(i)] = samples[i].label;
  }

  Rng rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::optional<Restart> best;
  for (std::size_t k = 0; k < options.restarts; ++k) {
    Eigen::VectorXd init(static_cast<Eigen::Index>(MlpModel::kParameterCount));
    for (auto& v : init) v = rng.normal();
    model.set_parameters(init);
    Restart r = levenberg_marquardt(model, x, y, options.max_epochs);
    if (!best || r.mse < best->mse) best = std::move(r);
  }

  MlpFit fit{MlpModel(best->params), best->mse, 0.0, best->epochs, std::move(best->history)};
  fit.heldout_accuracy = accuracy(fit.model, heldout_grid());
  if (!(fit.training_mse < options.target_mse))
    throw TrainingError("mlp: training MSE did not fall below target", fit.training_mse, fit.heldout_accuracy);
  return fit;
}

}  // namespace airsim::forecasting
