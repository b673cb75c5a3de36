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

#include <random>

#include "doctest.h"
#include "synthetic.hpp"
#include "windebm/baselines.hpp"
#include "windebm/error.hpp"
#include "windebm/metrics.hpp"

using namespace windebm;

namespace {

SupervisedMatrix linear_data(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  SupervisedMatrix m;
  m.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.y.resize(static_cast<Eigen::Index>(rows));
  for (Eigen::Index r = 0; r < m.X.rows(); ++r) {
    double y = 0.2 + 0.3 * n(rng);
    for (Eigen::Index c = 0; c < m.X.cols(); ++c) {
      m.X(r, c) = n(rng);
      y += static_cast<double>(c + 1) * 0.1 * m.X(r, c);
    }
    m.y(r) = y;
  }
  return m;
}

}  // namespace

TEST_CASE("ordinary least squares") {
  SUBCASE("exact line") {
    SupervisedMatrix d;
    d.X.resize(5, 1);
    d.y.resize(5);
    for (int i = 0; i < 5; ++i) {
      d.X(i, 0) = i * 0.25;
      d.y(i) = 2.0 * d.X(i, 0) + 0.1;
    }
    const auto m = fit_ols(d, {0, 5});
    CHECK(m.weights[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.intercept == doctest::Approx(0.1).epsilon(1e-12));
    const auto pred = predict_lr(m, d.X);
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(pred[static_cast<std::size_t>(i)] - d.y(i)) <= 1e-10);
    CHECK_FALSE(m.rank_deficient);
  }
  SUBCASE("constant target") {
    SupervisedMatrix d = linear_data(40, 3, 1);
    d.y.setConstant(0.42);
    const auto m = fit_ols(d, {0, 40});
    for (double w : m.weights) CHECK(std::fabs(w) <= 1e-12);
    CHECK(m.intercept == doctest::Approx(0.42).epsilon(1e-12));
  }
  SUBCASE("duplicated column uses the minimum-norm solution") {
    SupervisedMatrix d;
    d.X.resize(30, 2);
    d.y.resize(30);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 30; ++i) {
      d.X(i, 0) = d.X(i, 1) = u(rng);
      d.y(i) = 0.4 * d.X(i, 0) + 0.05;
    }
    const auto m = fit_ols(d, {0, 30});
    CHECK(m.rank_deficient);
    CHECK(m.rank == 2);
    CHECK(m.weights[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(m.weights[1] == doctest::Approx(0.2).epsilon(1e-9));
    const auto pred = predict_lr(m, d.X);
    for (int i = 0; i < 30; ++i) CHECK(std::fabs(pred[static_cast<std::size_t>(i)] - d.y(i)) <= 1e-10);
  }
  SUBCASE("residuals are orthogonal to every column") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SupervisedMatrix d = linear_data(200, 5, seed);
      const auto m = fit_ols(d, {20, 180});
      const auto pred = predict_lr(m, d.X);
      double s0 = 0.0;
      std::vector<double> s(5, 0.0);
      for (Eigen::Index r = 20; r < 180; ++r) {
        const double e = d.y(r) - pred[static_cast<std::size_t>(r)];
        s0 += e;
        for (Eigen::Index c = 0; c < 5; ++c) s[static_cast<std::size_t>(c)] += e * d.X(r, c);
      }
      CHECK(std::fabs(s0) <= 1e-8);
      for (double v : s) CHECK(std::fabs(v) <= 1e-8);
    }
  }
  SUBCASE("hand weights") {
    LinearModel m;
    m.intercept = 0.5;
    m.weights = {1.0, -2.0};
    Matrix X(3, 2);
    X << 1, 1, 0, 0.5, 2, -1;
    CHECK(predict_lr(m, X) == std::vector<double>{-0.5, -0.5, 4.5});
    LinearModel zero;
    zero.intercept = 0.3;
    zero.weights = {0.0, 0.0};
    CHECK(predict_lr(zero, X) == std::vector<double>(3, 0.3));
    CHECK_THROWS_AS(predict_lr(m, Matrix::Zero(2, 3)), ModelError);
  }
}

TEST_CASE("persistence") {
  TimeSeriesFrame f = windebm::testing::autocorrelated_series(200, 3);
  const SupervisedMatrix raw = build_lag_features(f, 4, 1);
  SUBCASE("last lag is the forecast") {
    const auto pm = make_persistence(raw);
    const auto out = persistence_forecast(pm, raw.X);
    for (std::size_t r = 0; r < raw.rows(); ++r) CHECK(out[r] == raw.X(static_cast<Eigen::Index>(r), 3));
    CHECK(persistence_forecast(raw) == out);
    CHECK(persistence_forecast(pm, raw.X) == out);
    Matrix one(1, 4);
    one << 0.1, 0.2, 0.3, 0.7;
    CHECK(persistence_forecast(pm, one)[0] == 0.7);
  }
  SUBCASE("normalized data is mapped onto the target scale") {
    const SupervisedMatrix norm = normalize_fit_apply(raw, {0, 150});
    const auto out = persistence_forecast(norm);
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double expect = norm.norm->target.apply(raw.X(static_cast<Eigen::Index>(r), 3));
      CHECK(out[r] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("needs lags") {
    SupervisedMatrix exo = raw;
    exo.latest_lag.reset();
    CHECK_THROWS_WITH_AS(make_persistence(exo), doctest::Contains("persistence requires historical target lags"),
                         DataError);
  }
}

TEST_CASE("regression tree baseline") {
  const SupervisedMatrix d = windebm::testing::interaction_dataset(2000, 4);
  const auto params = rt_baseline_params();
  CHECK(params.max_depth == 4);
  CHECK(params.min_samples_split == 4);
  CHECK(params.min_samples_leaf == 1);
  CHECK(params.criterion == SplitCriterion::kMae);
  const auto m = fit_rt_baseline(d, {0, 1600});
  CHECK(m.tree.depth() <= 4);
  const auto pred = predict_rt(m, d.X.bottomRows(400));
  const auto y = windebm::testing::slice(d.y, {1600, 2000});
  CHECK(r2(pred, y) > 0.3);
  CHECK(fit_rt_baseline(d, {0, 1600}).tree.nodes.size() == m.tree.nodes.size());
}
