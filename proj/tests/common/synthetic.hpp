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

// Synthetic data shared by the unit tests and the acceptance suite.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "windebm/data.hpp"

namespace windebm::testing {

// y = sin(2 pi x0) + 0.5 x1 + x2 x3 + noise over six uniform features; x4
// and x5 are pure noise. Timestamps are hourly.
inline SupervisedMatrix interaction_dataset(std::size_t rows, std::uint64_t seed, double sigma = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, sigma);
  SupervisedMatrix m;
  m.X.resize(static_cast<Eigen::Index>(rows), 6);
  m.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    for (Eigen::Index c = 0; c < 6; ++c) m.X(i, c) = u(rng);
    m.y(i) = std::sin(2.0 * std::numbers::pi * m.X(i, 0)) + 0.5 * m.X(i, 1) + m.X(i, 2) * m.X(i, 3) + noise(rng);
    m.timestamps.push_back(static_cast<std::int64_t>(r) * 3600);
  }
  m.feature_names = {"x1", "x2", "x3", "x4", "x5", "x6"};
  return m;
}

// Purely additive target over `features` uniform inputs.
inline SupervisedMatrix additive_dataset(std::size_t rows, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.02);
  SupervisedMatrix m;
  m.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(features));
  m.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    double y = noise(rng);
    for (std::size_t c = 0; c < features; ++c) {
      const double x = u(rng);
      m.X(i, static_cast<Eigen::Index>(c)) = x;
      y += (c % 3 == 0) ? std::sin(3.0 * x + static_cast<double>(c)) : (c % 3 == 1) ? x * x : 0.3 * x;
    }
    m.y(i) = y;
    m.timestamps.push_back(static_cast<std::int64_t>(r) * 3600);
  }
  for (std::size_t c = 0; c < features; ++c) m.feature_names.push_back("f" + std::to_string(c));
  return m;
}

// AR(1)-driven series clipped to [0,1], a stand-in for measured power.
inline TimeSeriesFrame autocorrelated_series(std::size_t length, std::uint64_t seed, double phi = 0.98) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> shock(0.0, 0.05);
  TimeSeriesFrame f;
  double level = 0.4;
  for (std::size_t t = 0; t < length; ++t) {
    level = 0.4 + phi * (level - 0.4) + shock(rng);
    f.timestamps.push_back(static_cast<std::int64_t>(t) * 1800);
    f.target.push_back(std::clamp(level, 0.0, 1.0));
  }
  return f;
}

inline std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline std::vector<double> slice(const Vector& v, RowRange r) { return {v.data() + r.begin, v.data() + r.end}; }

inline Matrix rows_of(const Matrix& X, RowRange r) {
  return X.middleRows(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size()));
}

}  // namespace windebm::testing
