// Copyright 2026 The WindEBM Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "windebm/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "windebm/error.hpp"

namespace windebm {

LinearModel fit_ols(const SupervisedMatrix& data, RowRange rows) {
  if (rows.empty() || rows.end > data.rows()) throw DataError("cannot fit a linear model on empty data");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(data.cols());
  const auto b = static_cast<Eigen::Index>(rows.begin);
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = data.X.middleRows(b, n);
  const Eigen::VectorXd target = data.y.segment(b, n);

  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd beta = cod.solve(target);
  if (!beta.allFinite()) throw DataError("least squares produced non-finite weights");

  LinearModel model;
  model.intercept = beta(0);
  model.weights.assign(beta.data() + 1, beta.data() + beta.size());
  model.feature_names = data.feature_names;
  model.norm = data.norm;
  model.rank = static_cast<std::size_t>(cod.rank());
  model.rank_deficient = cod.rank() < p + 1;
  return model;
}

std::vector<double> predict_lr(const LinearModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.weights.size()) {
    throw ModelError("matrix has " + std::to_string(X.cols()) + " columns, linear model expects " +
                     std::to_string(model.weights.size()));
  }
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double acc = model.intercept;
    for (Eigen::Index c = 0; c < X.cols(); ++c) acc += model.weights[static_cast<std::size_t>(c)] * X(r, c);
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

PersistenceModel make_persistence(const SupervisedMatrix& data) {
  if (!data.latest_lag) throw DataError("persistence requires historical target lags");
  return {*data.latest_lag, data.feature_names, data.norm};
}

std::vector<double> persistence_forecast(const PersistenceModel& model, const Matrix& X) {
  if (model.latest_lag >= static_cast<std::size_t>(X.cols())) {
    throw ModelError("persistence lag column out of range");
  }
  const auto col = static_cast<Eigen::Index>(model.latest_lag);
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    double v = X(r, col);
    if (model.norm) {
      // Back to raw power, then onto the target's [0,1] scale.
      v = model.norm->target.apply(model.norm->features[model.latest_lag].invert(v));
    }
    out[static_cast<std::size_t>(r)] = v;
  }
  return out;
}

std::vector<double> persistence_forecast(const SupervisedMatrix& data) {
  return persistence_forecast(make_persistence(data), data.X);
}

TreeParams rt_baseline_params() { return {4, 4, 1, SplitCriterion::kMae}; }

TreeModel fit_rt_baseline(const SupervisedMatrix& data, RowRange train, const TreeParams& params,
                          std::size_t max_bins) {
  TreeModel model;
  model.bins = fit_bins(data.X, train, max_bins);
  const BinnedMatrix binned = apply_bins(model.bins, data.X);
  model.tree = fit_cart(binned, {data.y.data(), static_cast<std::size_t>(data.y.size())}, params, train);
  model.feature_names = data.feature_names;
  model.norm = data.norm;
  return model;
}

std::vector<double> predict_rt(const TreeModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.bins.size()) throw ModelError("tree model column count mismatch");
  return predict_tree(model.tree, apply_bins(model.bins, X));
}

}  // namespace windebm
