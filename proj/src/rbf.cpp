#include <algorithm>
#include <cmath>

#include "airsim/error.hpp"
#include "airsim/forecasting.hpp"

namespace airsim::forecasting {

std::vector<Column> rbf_inputs(Pollutant p) {
  std::vector<Column> in(kClimateColumns.begin(), kClimateColumns.end());
  if (p == Pollutant::O3) {
    in.push_back(Column::SOx);
    in.push_back(Column::CO);
  } else {
    in.push_back(column_of(p));
  }
  return in;
}

namespace {

double scale_of(const ColumnRange& r) { return r.span() > 0.0 ? r.span() : 1.0; }

double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& c, double width) {
  return std::exp(-(x - c).squaredNorm() / (2.0 * width * width));
}

}  // namespace

void RbfModel::check() const {
  const auto d = static_cast<Eigen::Index>(inputs.size());
  if (d == 0 || input_ranges.size() != inputs.size()) throw DomainError("rbf: inputs and ranges disagree");
  if (centers.rows() < 1 || centers.cols() != d) throw DomainError("rbf: needs at least one center of input dimension");
  if (weights.size() != centers.rows()) throw DomainError("rbf: one weight per center expected");
  if (linear.size() != d) throw DomainError("rbf: one linear coefficient per input expected");
  if (!(width > 0.0)) throw DomainError("rbf: width must be > 0");
  if (!(target_range > 0.0)) throw DomainError("rbf: target range must be > 0");
}

Eigen::VectorXd RbfModel::scale(std::span<const double> features) const {
  if (features.size() != inputs.size())
    throw DomainError("rbf: expected " + std::to_string(inputs.size()) + " features, got " +
                      std::to_string(features.size()));
  Eigen::VectorXd x(static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& r = input_ranges[i];
    x[static_cast<Eigen::Index>(i)] = std::clamp(features[i], r.min, r.max) / scale_of(r);
  }
  return x;
}

double RbfModel::raw(const Eigen::VectorXd& x) const {
  double out = bias + linear.dot(x);
  for (Eigen::Index k = 0; k < centers.rows(); ++k) out += weights[k] * kernel(x, centers.row(k).transpose(), width);
  return out;
}

double predict_pollutant(const RbfModel& model, std::span<const double> features) {
  return std::max(0.0, model.raw(model.scale(features)) * model.target_range);
}

namespace {

struct Pairs {
  Eigen::MatrixXd x;  // normalized inputs
  Eigen::VectorXd y;  // normalized target
  Eigen::VectorXd persistence;  // raw target column at t
  Eigen::VectorXd actual;       // raw target at t + h
};

Pairs make_pairs(const TimeSeriesDataset& data, const std::vector<Column>& inputs,
                 const std::vector<ColumnRange>& ranges, Column target, double target_range, int horizon,
                 std::size_t first, std::size_t last, std::size_t stride) {
  Pairs p;
  std::vector<std::size_t> rows;
  for (std::size_t t = first; t < last; t += stride) rows.push_back(t);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(inputs.size());
  p.x.resize(n, d);
  p.y.resize(n);
  p.persistence.resize(n);
  p.actual.resize(n);
  const auto& tgt = data.column(target);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t t = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto& r = ranges[static_cast<std::size_t>(j)];
      p.x(i, j) = std::clamp(data.column(inputs[static_cast<std::size_t>(j)])[t], r.min, r.max) / scale_of(r);
    }
    p.actual[i] = tgt[t + static_cast<std::size_t>(horizon)];
    p.persistence[i] = tgt[t];
    p.y[i] = p.actual[i] / target_range;
  }
  return p;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers, double width) {
  Eigen::MatrixXd phi(x.rows(), centers.rows());
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    const Eigen::RowVectorXd c = centers.row(k);
    phi.col(k) = (-(x.rowwise() - c).rowwise().squaredNorm() / (2.0 * width * width)).array().exp().matrix();
  }
  return phi;
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

double median_pairwise_distance(const Eigen::MatrixXd& pts) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j) d.push_back((pts.row(i) - pts.row(j)).norm());
  if (d.empty()) return 0.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

struct Candidate {
  RbfModel model;
  double validation_rmse = 0.0;
  double training_rmse = 0.0;
};

// Least-squares fit of bias, linear part and kernel weights for fixed centers.
Candidate fit_weights(RbfModel model, const Pairs& train, const Pairs& val) {
  Eigen::MatrixXd design(train.x.rows(), train.x.cols() + 1 + model.centers.rows());
  design << affine(train.x), kernel_matrix(train.x, model.centers, model.width);
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(train.y);
  const auto d = train.x.cols();
  model.bias = beta[0];
  model.linear = beta.segment(1, d);
  model.weights = beta.tail(model.centers.rows());

  auto score = [&](const Pairs& p) {
    Eigen::MatrixXd dm(p.x.rows(), design.cols());
    dm << affine(p.x), kernel_matrix(p.x, model.centers, model.width);
    const Eigen::VectorXd pred = ((dm * beta) * model.target_range).cwiseMax(0.0);
    return std::sqrt((pred - p.actual).squaredNorm() / static_cast<double>(p.x.rows()));
  };
  const double v = score(val);
  const double t = score(train);
  return {std::move(model), v, t};
}

struct Split {
  std::size_t pairs;
  std::size_t boundary;
};

Split split_of(const TimeSeriesDataset& data, int horizon, double validation_fraction) {
  if (horizon < 1) throw DomainError("forecast horizon must be >= 1 hour");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw DomainError("validation fraction must lie in (0, 1)");
  const auto h = static_cast<std::size_t>(horizon);
  if (data.rows() < h + 20) throw DomainError("dataset too short to form training pairs");
  const std::size_t pairs = data.rows() - h;
  const auto boundary =
      static_cast<std::size_t>(std::floor(static_cast<double>(pairs) * (1.0 - validation_fraction)));
  if (boundary < 10 || pairs - boundary < 5) throw DomainError("dataset too short for a train/validation split");
  return {pairs, boundary};
}

}  // namespace

double persistence_rmse(const TimeSeriesDataset& data, Pollutant pollutant, int horizon, double validation_fraction) {
  const auto s = split_of(data, horizon, validation_fraction);
  const auto& c = data.column(column_of(pollutant));
  std::vector<double> pred, actual;
  for (std::size_t t = s.boundary; t < s.pairs; ++t) {
    pred.push_back(c[t]);
    actual.push_back(c[t + static_cast<std::size_t>(horizon)]);
  }
  return rmse(pred, actual);
}

RbfFit train_rbf(const TimeSeriesDataset& data, Pollutant pollutant, int horizon, const RbfOptions& options) {
  if (options.max_centers < 1) throw DomainError("max_centers must be >= 1");
  const auto split = split_of(data, horizon, options.validation_fraction);

  RbfModel proto;
  proto.pollutant = pollutant;
  proto.horizon = horizon;
  proto.inputs = rbf_inputs(pollutant);
  for (Column c : proto.inputs) proto.input_ranges.push_back(data.range(c));
  const Column target = column_of(pollutant);
  proto.target_range = scale_of(data.range(target));

  const std::size_t stride = std::max<std::size_t>(1, (split.boundary + options.max_training_rows - 1) /
                                                          options.max_training_rows);
  const Pairs train = make_pairs(data, proto.inputs, proto.input_ranges, target, proto.target_range, horizon, 0,
                                 split.boundary, stride);
  const Pairs val = make_pairs(data, proto.inputs, proto.input_ranges, target, proto.target_range, horizon,
                               split.boundary, split.pairs, 1);
  const auto n = train.x.rows();

  // Candidate centers: evenly spaced training inputs, duplicates dropped.
  const std::size_t cstride = std::max<std::size_t>(
      1, (static_cast<std::size_t>(n) + options.max_candidates - 1) / options.max_candidates);
  std::vector<Eigen::Index> cand_rows;
  for (Eigen::Index i = 0; i < n; i += static_cast<Eigen::Index>(cstride)) {
    bool dup = false;
    for (auto r : cand_rows) dup = dup || train.x.row(r) == train.x.row(i);
    if (!dup) cand_rows.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(cand_rows.size());
  Eigen::MatrixXd pool(m, train.x.cols());
  for (Eigen::Index k = 0; k < m; ++k) pool.row(k) = train.x.row(cand_rows[static_cast<std::size_t>(k)]);
  double width = median_pairwise_distance(pool);
  if (!(width > 0.0)) width = 1.0;

  // Orthogonal forward selection: candidate columns are kept orthogonal to
  // everything already in the model, so the residual reduction of adding a
  // column j is (p_j . r)^2 / |p_j|^2.
  const Eigen::MatrixXd a = affine(train.x);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd qa = qr.householderQ() * Eigen::MatrixXd::Identity(n, a.cols());
  Eigen::VectorXd residual = train.y - qa * (qa.transpose() * train.y);
  Eigen::MatrixXd p = kernel_matrix(train.x, pool, width);
  const Eigen::VectorXd original_norms = p.colwise().squaredNorm().transpose();
  p -= qa * (qa.transpose() * p);

  std::vector<Eigen::Index> chosen;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  std::optional<Candidate> best;
  std::size_t since_best = 0;
  const auto limit = std::min<std::size_t>(options.max_centers, static_cast<std::size_t>(m));
  while (chosen.size() < limit) {
    Eigen::Index pick = -1;
    double top = -1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double nn = p.col(j).squaredNorm();
      if (!(nn > 1e-10 * original_norms[j])) continue;
      const double proj = p.col(j).dot(residual);
      const double gain = proj * proj / nn;
      if (gain > top) {
        top = gain;
        pick = j;
      }
    }
    if (pick < 0) break;
    used[static_cast<std::size_t>(pick)] = true;
    chosen.push_back(pick);
    const Eigen::VectorXd q = p.col(pick) / p.col(pick).norm();
    residual -= q * q.dot(residual);
    p -= q * (q.transpose() * p);

    RbfModel model = proto;
    model.width = width;
    model.centers.resize(static_cast<Eigen::Index>(chosen.size()), train.x.cols());
    for (std::size_t k = 0; k < chosen.size(); ++k) model.centers.row(static_cast<Eigen::Index>(k)) = pool.row(chosen[k]);
    Candidate c = fit_weights(std::move(model), train, val);
    if (!best || c.validation_rmse < best->validation_rmse) {
      best = std::move(c);
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  if (!best) throw DomainError("rbf: no usable center candidates");

  // Re-fit with the width set from the selected centers; keep it unless it
  // validates worse than the selection-time width.
  if (best->model.center_count() >= 2) {
    RbfModel refit = best->model;
    const double w = median_pairwise_distance(refit.centers);
    if (w > 0.0) {
      refit.width = w;
      Candidate c = fit_weights(std::move(refit), train, val);
      if (c.validation_rmse <= best->validation_rmse) best = std::move(c);
    }
  }

  RbfFit fit{std::move(best->model), {}};
  fit.report.pollutant = pollutant;
  fit.report.centers = fit.model.center_count();
  fit.report.validation_rmse = best->validation_rmse;
  fit.report.training_rmse = best->training_rmse;
  fit.report.baseline_rmse = persistence_rmse(data, pollutant, horizon, options.validation_fraction);
  fit.model.check();
  return fit;
}

}  // namespace airsim::forecasting
