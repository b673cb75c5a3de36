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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "windebm/binning.hpp"
#include "windebm/data.hpp"
#include "windebm/tree.hpp"

namespace windebm {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> weights;
  std::vector<std::string> feature_names;
  std::optional<NormParams> norm;
  std::size_t rank = 0;  // numerical rank of [1 | X] at fit time
  bool rank_deficient = false;
};

// Least squares over the rows of `rows` using a complete orthogonal
// decomposition; a rank-deficient design gets the minimum-norm solution and
// rank_deficient = true.
LinearModel fit_ols(const SupervisedMatrix& data, RowRange rows);
std::vector<double> predict_lr(const LinearModel& model, const Matrix& X);

// Stateless: the forecast is the most recent lag, mapped from the lag
// column's scale to the target's scale when normalization is known.
struct PersistenceModel {
  std::size_t latest_lag = 0;
  std::vector<std::string> feature_names;
  std::optional<NormParams> norm;
};

PersistenceModel make_persistence(const SupervisedMatrix& data);
std::vector<double> persistence_forecast(const PersistenceModel& model, const Matrix& X);
std::vector<double> persistence_forecast(const SupervisedMatrix& data);

struct TreeModel {
  RegressionTree tree;
  BinningMap bins;
  std::vector<std::string> feature_names;
  std::optional<NormParams> norm;
};

// Depth 4, min split 4, min leaf 1, mean-absolute-error splits.
TreeParams rt_baseline_params();
TreeModel fit_rt_baseline(const SupervisedMatrix& data, RowRange train, const TreeParams& params = rt_baseline_params(),
                          std::size_t max_bins = 256);
std::vector<double> predict_rt(const TreeModel& model, const Matrix& X);

}  // namespace windebm
