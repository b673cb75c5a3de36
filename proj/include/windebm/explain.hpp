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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windebm/data.hpp"
#include "windebm/glassbox.hpp"

namespace windebm {

// Any model, seen only through its forecasts for a batch of normalized rows.
using Predictor = std::function<std::vector<double>(const Matrix&)>;
using Metric = std::function<double(std::span<const double> forecast, std::span<const double> actual)>;

struct TermScore {
  std::size_t term = 0;
  std::string name;
  bool is_pair = false;
  double score = 0.0;
};

struct GlobalImportanceReport {
  std::vector<TermScore> terms;  // descending score, ties by term

  std::vector<std::string> ordering(bool include_pairs = true) const;
};

struct LocalExplanation {
  double intercept = 0.0;
  double forecast = 0.0;
  std::optional<double> actual;
  std::vector<TermContribution> contributions;  // descending |value|

  // "Actual(0.994), Forecasts(0.877) = 0.455 + 0.506 - ..." style line.
  std::string summary_line(int precision = 3) const;
};

struct ShapeCurve {
  std::string feature;
  std::vector<double> centers;  // bin centers, normalized or raw units
  std::vector<double> values;
};

struct PairHeatmap {
  std::string first;
  std::string second;
  std::vector<double> row_centers;  // coarse bins of `first`
  std::vector<double> col_centers;  // coarse bins of `second`
  std::vector<double> values;       // row-major rows x cols

  double at(std::size_t r, std::size_t c) const { return values[r * col_centers.size() + c]; }
};

struct RankingAgreement {
  bool exact_match = false;
  double rank_correlation = 0.0;  // Spearman, in [-1, 1]
};

Predictor glassbox_predictor(const GlassBoxModel& model);

GlobalImportanceReport global_importance(const GlassBoxModel& model, const Matrix& reference);
LocalExplanation local_explanation(const GlassBoxModel& model, std::span<const double> row,
                                   std::optional<double> actual = std::nullopt);

std::size_t find_feature(const GlassBoxModel& model, const std::string& name);
ShapeCurve export_shape(const GlassBoxModel& model, std::size_t feature, bool denormalize = false);
PairHeatmap export_pair_heatmap(const GlassBoxModel& model, FeaturePair pair, bool denormalize = false);

// Model bin centers of a feature, the default PDP grid.
std::vector<double> bin_center_grid(const GlassBoxModel& model, std::size_t feature);

std::vector<double> pdp(const Predictor& predictor, const Matrix& X, std::size_t feature, std::span<const double> grid);
// Range (max - min) of each feature's PDP curve.
std::vector<double> pdp_importance(const Predictor& predictor, const Matrix& X,
                                   const std::vector<std::vector<double>>& grids);

// importance(i) = mean over repeats of metric(permuted i) - metric(original).
std::vector<double> pfi(const Predictor& predictor, const Matrix& X, std::span<const double> y, const Metric& metric,
                        std::size_t n_repeats, std::uint64_t seed);
std::vector<double> pfi(const Predictor& predictor, const Matrix& X, std::span<const double> y, std::size_t n_repeats,
                        std::uint64_t seed);

// Names sorted by descending score, ties by position.
std::vector<std::string> ordering_from_scores(const std::vector<std::string>& names, std::span<const double> scores);

RankingAgreement ranking_consistency(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace windebm
