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

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windebm/error.hpp"

namespace windebm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Half-open row interval [begin, end).
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return size() == 0; }
  bool operator==(const RowRange&) const = default;
};

enum class TimestampFormat { kAuto, kIso8601, kEpochSeconds };

struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string target_column = "power";
  // Empty means no exogenous inputs.
  std::vector<std::string> exogenous_columns;
  char delimiter = ',';
  TimestampFormat timestamp_format = TimestampFormat::kAuto;
};

struct TimeSeriesFrame {
  std::vector<std::int64_t> timestamps;  // seconds since the Unix epoch
  std::vector<double> target;
  std::vector<std::string> exogenous_names;
  std::vector<std::vector<double>> exogenous;  // one vector per column
  std::size_t dropped_rows = 0;

  std::size_t size() const { return target.size(); }
};

// Min/max of one column over the fitting rows.
struct ColumnScale {
  double min = 0.0;
  double max = 1.0;

  bool constant() const { return !(max > min); }
  // Maps into [0,1], clamping. Constant columns map to 0.5.
  double apply(double v) const;
  double invert(double v) const;
};

struct NormParams {
  std::vector<ColumnScale> features;
  ColumnScale target;
};

struct SupervisedMatrix {
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;
  // Timestamp of the target of every row.
  std::vector<std::int64_t> timestamps;
  // Column holding y(t) in lag mode.
  std::optional<std::size_t> latest_lag;
  std::optional<NormParams> norm;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }
};

struct DataSplit {
  RowRange train;
  RowRange val;
  RowRange test;
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

std::int64_t parse_timestamp(const std::string& text, TimestampFormat format);

TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema);
TimeSeriesFrame parse_csv(std::istream& in, const CsvSchema& schema);

// Row t: [y(t-n_lags+1) ... y(t)] -> y(t+horizon_steps). Feature names run
// "lag_{n_lags-1}" ... "lag_0"; lag_0 is the most recent observation.
SupervisedMatrix build_lag_features(const TimeSeriesFrame& frame, std::size_t n_lags,
                                    std::size_t horizon_steps);
SupervisedMatrix build_exogenous_features(const TimeSeriesFrame& frame);

NormParams fit_normalization(const SupervisedMatrix& matrix, RowRange fit_range);
SupervisedMatrix apply_normalization(SupervisedMatrix matrix, const NormParams& params);
SupervisedMatrix normalize_fit_apply(const SupervisedMatrix& matrix, RowRange fit_range);

DataSplit chronological_split(std::size_t rows, SplitFractions fractions = {});

double pearson_correlation(std::span<const double> a, std::span<const double> b);

std::vector<double> column_values(const Matrix& X, std::size_t col);

}  // namespace windebm
