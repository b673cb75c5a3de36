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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windebm/binning.hpp"
#include "windebm/data.hpp"
#include "windebm/tree.hpp"

namespace windebm {

// How many feature pairs receive an interaction term.
struct InteractionBudget {
  enum class Mode { kAuto, kAll, kTopK };

  // In auto mode every pair is used up to this many features, else the
  // top kAutoTopK ranked pairs.
  static constexpr std::size_t kAutoAllLimit = 12;
  static constexpr std::size_t kAutoTopK = 10;

  Mode mode = Mode::kAuto;
  std::size_t k = 0;

  static InteractionBudget all() { return {Mode::kAll, 0}; }
  static InteractionBudget top(std::size_t k) { return {Mode::kTopK, k}; }
  static InteractionBudget none() { return top(0); }
  // "auto", "all" or a count.
  static InteractionBudget parse(const std::string& text);
  std::string to_string() const;
  std::size_t resolve(std::size_t n_features) const;
  bool operator==(const InteractionBudget&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t max_rounds = 5000;  // full cycles over the terms, per stage
  double early_stop_tol = 1e-4;
  std::size_t early_stop_patience = 50;  // 0 disables early stopping
  std::size_t min_samples_split = 5;
  std::size_t min_samples_leaf = 1;
  int main_depth = 2;
  int pair_depth = 3;
  std::size_t max_bins = 256;
  std::size_t pair_bins = 32;
  InteractionBudget interactions;
  std::size_t bagging_count = 0;  // < 2 means no bagging
  std::uint64_t seed = 0;
  bool track_training_loss = false;

  void validate() const;
  TreeParams main_tree() const;
  TreeParams pair_tree() const;
};

struct ShapeFunction {
  std::size_t feature = 0;
  std::vector<double> values;  // one per bin of the feature
};

struct PairShapeFunction {
  std::size_t first = 0;
  std::size_t second = 0;  // first < second
  std::size_t rows = 0;    // coarse bins of `first`
  std::size_t cols = 0;    // coarse bins of `second`
  std::vector<double> values;  // row-major

  double at(std::size_t a, std::size_t b) const { return values[a * cols + b]; }
};

struct FeaturePair {
  std::size_t first = 0;
  std::size_t second = 0;
  bool operator==(const FeaturePair&) const = default;
};

struct PairStrength {
  FeaturePair pair;
  double strength = 0.0;
};

struct TrainingSummary {
  std::size_t main_rounds = 0;
  std::size_t pair_rounds = 0;
  std::vector<double> main_validation;  // validation NRMSE after each cycle
  std::vector<double> pair_validation;
  // Training MSE before the first and after every boosting step; only
  // filled when TrainConfig::track_training_loss is set. Not persisted.
  std::vector<double> training_loss;
};

struct GlassBoxModel {
  double intercept = 0.0;
  std::vector<ShapeFunction> shapes;      // one per feature, by index
  std::vector<PairShapeFunction> pairs;   // ascending (first, second)
  BinningMap bins;
  std::vector<CoarseBinning> pair_binning;  // per feature
  std::optional<NormParams> norm;
  std::vector<std::string> feature_names;
  TrainConfig config;
  TrainingSummary summary;

  std::size_t feature_count() const { return shapes.size(); }
  // Terms are numbered mains first (by feature), then pairs.
  std::size_t term_count() const { return shapes.size() + pairs.size(); }
  std::string term_name(std::size_t term) const;
};

struct TermContribution {
  std::size_t term = 0;
  std::string name;
  double value = 0.0;
};

struct Breakdown {
  double forecast = 0.0;
  double intercept = 0.0;
  std::vector<TermContribution> contributions;  // term order

  // Largest |value| first, ties by term.
  std::vector<TermContribution> sorted_by_magnitude() const;
};

struct MainEffectsResult {
  GlassBoxModel model;
  // y - prediction for every row of the matrix.
  std::vector<double> residuals;
};

MainEffectsResult train_main_effects(const SupervisedMatrix& data, const DataSplit& split, const BinningMap& bins,
                                     const TrainConfig& config);

// Interaction strength of every pair over the coarse grid: the SSE the best
// additive grid model leaves that the full cell-mean grid model removes.
// Sorted by descending strength, ties by (first, second).
std::vector<PairStrength> rank_interaction_pairs(const BinnedMatrix& coarse, std::span<const double> residuals,
                                                 RowRange rows);

// Pairs the budget admits, ascending by (first, second).
std::vector<FeaturePair> select_pairs(const std::vector<PairStrength>& ranked, std::size_t n_features,
                                      const InteractionBudget& budget);

GlassBoxModel train_interactions(GlassBoxModel partial, const SupervisedMatrix& data, const DataSplit& split,
                                 std::span<const double> residuals, std::span<const FeaturePair> pairs,
                                 const TrainConfig& config);

// Bins, main effects, pair selection, interactions, and optional bagging.
GlassBoxModel train_glassbox(const SupervisedMatrix& data, const DataSplit& split, const TrainConfig& config);

// Rows of X must be normalized like the training data.
std::vector<double> predict(const GlassBoxModel& model, const Matrix& X);
double predict_row(const GlassBoxModel& model, std::span<const double> row);
Breakdown predict_with_breakdown(const GlassBoxModel& model, std::span<const double> row);

// Fitted population of every pair cell over the given rows.
std::vector<double> pair_population(const GlassBoxModel& model, const PairShapeFunction& pair, const Matrix& X,
                                    RowRange rows);

}  // namespace windebm
