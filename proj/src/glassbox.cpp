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

#include "windebm/glassbox.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "windebm/error.hpp"

namespace windebm {
namespace {

// One additive term being boosted: a lookup table indexed by the joint bins
// of one or two columns of `source`.
struct BoostedTerm {
  std::vector<std::size_t> features;
  const BinnedMatrix* source = nullptr;
  std::vector<double>* table = nullptr;
};

class StageBooster {
 public:
  StageBooster(std::span<const double> y, const DataSplit& split, std::span<const double> weights,
               std::vector<double>& residuals, const TrainConfig& config, TrainingSummary& summary)
      : y_(y), split_(split), weights_(weights), residuals_(residuals), config_(config), summary_(summary) {}

  // Returns the number of full cycles run.
  std::size_t run(std::vector<BoostedTerm>& terms, const TreeParams& params, std::vector<double>& curve) {
    if (terms.empty()) return 0;
    const bool early_stopping = config_.early_stop_patience > 0 && !split_.val.empty();
    std::vector<double> best;
    if (config_.track_training_loss && summary_.training_loss.empty()) {
      summary_.training_loss.push_back(training_mse());
    }
    std::size_t round = 0;
    while (round < config_.max_rounds) {
      ++round;
      for (auto& term : terms) step(term, params);
      if (!split_.val.empty()) {
        const double v = validation_nrmse();
        curve.push_back(v);
        best.push_back(best.empty() ? v : std::min(best.back(), v));
      }
      if (early_stopping && best.size() > config_.early_stop_patience) {
        const double before = best[best.size() - 1 - config_.early_stop_patience];
        if (before - best.back() < config_.early_stop_tol) break;
      }
    }
    return round;
  }

 private:
  void step(BoostedTerm& term, const TreeParams& params) {
    const GridHistogram hist = GridHistogram::build(*term.source, residuals_, term.features, split_.train, weights_);
    const RegressionTree tree = fit_tree_from_histogram(hist, params);
    const std::vector<double> update = tree_as_bin_table(tree, hist.features, hist.dims);
    const double lr = config_.learning_rate;
    auto& table = *term.table;
    for (std::size_t c = 0; c < table.size(); ++c) table[c] += lr * update[c];

    const auto& c0 = term.source->columns[hist.features[0]];
    if (hist.features.size() == 1) {
      for (std::size_t r = 0; r < residuals_.size(); ++r) residuals_[r] -= lr * update[c0[r]];
    } else {
      const auto& c1 = term.source->columns[hist.features[1]];
      for (std::size_t r = 0; r < residuals_.size(); ++r) residuals_[r] -= lr * update[hist.cell(c0[r], c1[r])];
    }
    if (config_.track_training_loss) summary_.training_loss.push_back(training_mse());
  }

  double training_mse() const {
    double s = 0.0, w = 0.0;
    for (std::size_t r = split_.train.begin; r < split_.train.end; ++r) {
      const double wr = weights_.empty() ? 1.0 : weights_[r];
      s += wr * residuals_[r] * residuals_[r];
      w += wr;
    }
    return w > 0.0 ? s / w : 0.0;
  }

  double validation_nrmse() const {
    double s = 0.0;
    for (std::size_t r = split_.val.begin; r < split_.val.end; ++r) s += residuals_[r] * residuals_[r];
    return std::sqrt(s / static_cast<double>(split_.val.size()));
  }

  std::span<const double> y_;
  const DataSplit& split_;
  std::span<const double> weights_;
  std::vector<double>& residuals_;
  const TrainConfig& config_;
  TrainingSummary& summary_;
};

std::span<const double> target_span(const SupervisedMatrix& data) {
  return {data.y.data(), static_cast<std::size_t>(data.y.size())};
}

void check_training_inputs(const SupervisedMatrix& data, const DataSplit& split, const TrainConfig& config) {
  config.validate();
  if (data.cols() == 0) throw DataError("no feature columns");
  if (split.train.empty()) throw DataError("empty training range");
  const std::size_t rows = data.rows();
  if (split.train.end > rows || split.val.end > rows || split.test.end > rows) {
    throw DataError("split range exceeds matrix rows");
  }
}

// Subtracts the population-weighted mean from `values`; returns that mean.
double center_table(std::vector<double>& values, const std::vector<double>& population) {
  double total = 0.0, weighted = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c) {
    total += population[c];
    weighted += population[c] * values[c];
  }
  if (total <= 0.0) return 0.0;
  const double mean = weighted / total;
  for (auto& v : values) v -= mean;
  return mean;
}

std::vector<double> column_population(const BinnedMatrix& X, std::size_t col, RowRange rows) {
  std::vector<double> pop(X.bin_counts[col], 0.0);
  for (std::size_t r = rows.begin; r < rows.end; ++r) pop[X.columns[col][r]] += 1.0;
  return pop;
}

std::vector<double> grid_population(const BinnedMatrix& coarse, const PairShapeFunction& p, RowRange rows) {
  std::vector<double> pop(p.values.size(), 0.0);
  const auto& a = coarse.columns[p.first];
  const auto& b = coarse.columns[p.second];
  for (std::size_t r = rows.begin; r < rows.end; ++r) pop[a[r] * p.cols + b[r]] += 1.0;
  return pop;
}

void center_main_effects(GlassBoxModel& model, const BinnedMatrix& binned, RowRange train) {
  for (auto& shape : model.shapes) {
    model.intercept += center_table(shape.values, column_population(binned, shape.feature, train));
  }
}

void center_pairs(GlassBoxModel& model, const BinnedMatrix& coarse, RowRange train) {
  for (auto& pair : model.pairs) model.intercept += center_table(pair.values, grid_population(coarse, pair, train));
}

MainEffectsResult train_main_weighted(const SupervisedMatrix& data, const DataSplit& split, const BinningMap& bins,
                                      const TrainConfig& config, std::span<const double> weights) {
  check_training_inputs(data, split, config);
  if (bins.size() != data.cols()) throw ModelError("binning map does not match the feature count");
  const BinnedMatrix binned = apply_bins(bins, data.X);
  const auto y = target_span(data);

  MainEffectsResult result;
  GlassBoxModel& model = result.model;
  model.bins = bins;
  model.norm = data.norm;
  model.feature_names = data.feature_names;
  if (model.feature_names.size() != data.cols()) {
    model.feature_names.clear();
    for (std::size_t f = 0; f < data.cols(); ++f) model.feature_names.push_back("x" + std::to_string(f));
  }
  model.config = config;
  for (std::size_t f = 0; f < data.cols(); ++f) {
    model.shapes.push_back({f, std::vector<double>(binned.bin_counts[f], 0.0)});
    model.pair_binning.push_back(coarsen_bins(bins.features[f], config.pair_bins));
  }

  double s = 0.0, w = 0.0;
  for (std::size_t r = split.train.begin; r < split.train.end; ++r) {
    const double wr = weights.empty() ? 1.0 : weights[r];
    s += wr * y[r];
    w += wr;
  }
  if (!(w > 0.0)) throw DataError("training weights sum to zero");
  model.intercept = s / w;
  result.residuals.resize(y.size());
  for (std::size_t r = 0; r < y.size(); ++r) result.residuals[r] = y[r] - model.intercept;

  std::vector<BoostedTerm> terms;
  for (auto& shape : model.shapes) terms.push_back({{shape.feature}, &binned, &shape.values});
  StageBooster booster(y, split, weights, result.residuals, config, model.summary);
  model.summary.main_rounds = booster.run(terms, config.main_tree(), model.summary.main_validation);
  center_main_effects(model, binned, split.train);
  return result;
}

GlassBoxModel train_interactions_weighted(GlassBoxModel model, const SupervisedMatrix& data, const DataSplit& split,
                                          std::span<const double> residuals_in, std::span<const FeaturePair> pairs,
                                          const TrainConfig& config, std::span<const double> weights) {
  check_training_inputs(data, split, config);
  const std::size_t n = model.feature_count();
  if (n != data.cols()) throw ModelError("model does not match the feature count");
  if (residuals_in.size() != data.rows()) throw DataError("residual length does not match row count");
  std::vector<FeaturePair> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end(), [](const FeaturePair& a, const FeaturePair& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& p = sorted[i];
    if (p.first >= p.second || p.second >= n) {
      throw ModelError("pair (" + std::to_string(p.first) + "," + std::to_string(p.second) + ") references an unknown feature");
    }
    if (i > 0 && sorted[i - 1] == p) throw ModelError("duplicate pair");
    for (const auto& existing : model.pairs) {
      if (existing.first == p.first && existing.second == p.second) throw ModelError("pair already in model");
    }
  }
  if (sorted.empty()) return model;

  const BinnedMatrix coarse = coarsen(apply_bins(model.bins, data.X), model.pair_binning);
  const std::size_t first_new = model.pairs.size();
  for (const auto& p : sorted) {
    PairShapeFunction ps;
    ps.first = p.first;
    ps.second = p.second;
    ps.rows = coarse.bin_counts[p.first];
    ps.cols = coarse.bin_counts[p.second];
    ps.values.assign(ps.rows * ps.cols, 0.0);
    model.pairs.push_back(std::move(ps));
  }
  std::vector<double> residuals(residuals_in.begin(), residuals_in.end());
  std::vector<BoostedTerm> terms;
  for (std::size_t i = first_new; i < model.pairs.size(); ++i) {
    auto& p = model.pairs[i];
    terms.push_back({{p.first, p.second}, &coarse, &p.values});
  }
  StageBooster booster(target_span(data), split, weights, residuals, config, model.summary);
  model.summary.pair_rounds = booster.run(terms, config.pair_tree(), model.summary.pair_validation);
  std::sort(model.pairs.begin(), model.pairs.end(), [](const PairShapeFunction& a, const PairShapeFunction& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  center_pairs(model, coarse, split.train);
  return model;
}

GlassBoxModel train_single(const SupervisedMatrix& data, const DataSplit& split, const BinningMap& bins,
                           const TrainConfig& config, std::span<const double> weights) {
  MainEffectsResult main = train_main_weighted(data, split, bins, config, weights);
  const std::size_t n = data.cols();
  if (n < 2 || config.interactions.resolve(n) == 0) return std::move(main.model);
  const BinnedMatrix coarse = coarsen(apply_bins(bins, data.X), main.model.pair_binning);
  const auto ranked = rank_interaction_pairs(coarse, main.residuals, split.train);
  const auto pairs = select_pairs(ranked, n, config.interactions);
  return train_interactions_weighted(std::move(main.model), data, split, main.residuals, pairs, config, weights);
}

template <class Visit>
double accumulate_terms(const GlassBoxModel& model, std::span<const double> row, std::vector<BinIndex>& bins,
                        Visit&& visit) {
  const std::size_t n = model.feature_count();
  if (row.size() != n) {
    throw ModelError("row has " + std::to_string(row.size()) + " features, model expects " + std::to_string(n));
  }
  bins.resize(n);
  double acc = model.intercept;
  for (std::size_t f = 0; f < n; ++f) {
    bins[f] = model.bins.features[f].bin_of(row[f]);
    const double v = model.shapes[f].values[bins[f]];
    visit(f, v);
    acc += v;
  }
  for (std::size_t p = 0; p < model.pairs.size(); ++p) {
    const auto& pair = model.pairs[p];
    const double v = pair.at(model.pair_binning[pair.first].map[bins[pair.first]],
                             model.pair_binning[pair.second].map[bins[pair.second]]);
    visit(n + p, v);
    acc += v;
  }
  return acc;
}

}  // namespace

InteractionBudget InteractionBudget::parse(const std::string& text) {
  if (text == "auto") return {};
  if (text == "all") return all();
  std::size_t pos = 0;
  long long k = -1;
  try {
    k = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || k < 0) throw ConfigError("interaction budget must be 'auto', 'all' or a count >= 0");
  return top(static_cast<std::size_t>(k));
}

std::string InteractionBudget::to_string() const {
  switch (mode) {
    case Mode::kAuto: return "auto";
    case Mode::kAll: return "all";
    case Mode::kTopK: return std::to_string(k);
  }
  return "auto";
}

std::size_t InteractionBudget::resolve(std::size_t n_features) const {
  const std::size_t total = n_features < 2 ? 0 : n_features * (n_features - 1) / 2;
  switch (mode) {
    case Mode::kAll: return total;
    case Mode::kTopK: return std::min(k, total);
    case Mode::kAuto: return n_features <= kAutoAllLimit ? total : std::min(kAutoTopK, total);
  }
  return total;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (!(early_stop_tol >= 0.0)) throw ConfigError("early_stop_tol must be >= 0");
  if (max_bins < 2) throw ConfigError("max_bins must be >= 2");
  if (pair_bins < 2) throw ConfigError("pair_bins must be >= 2");
  main_tree().validate();
  pair_tree().validate();
}

TreeParams TrainConfig::main_tree() const {
  return {main_depth, min_samples_split, min_samples_leaf, SplitCriterion::kSse};
}

TreeParams TrainConfig::pair_tree() const {
  return {pair_depth, min_samples_split, min_samples_leaf, SplitCriterion::kSse};
}

std::string GlassBoxModel::term_name(std::size_t term) const {
  if (term < shapes.size()) return feature_names[shapes[term].feature];
  const auto& p = pairs.at(term - shapes.size());
  return feature_names[p.first] + " x " + feature_names[p.second];
}

std::vector<TermContribution> Breakdown::sorted_by_magnitude() const {
  auto out = contributions;
  std::stable_sort(out.begin(), out.end(), [](const TermContribution& a, const TermContribution& b) {
    return std::abs(a.value) > std::abs(b.value);
  });
  return out;
}

MainEffectsResult train_main_effects(const SupervisedMatrix& data, const DataSplit& split, const BinningMap& bins,
                                     const TrainConfig& config) {
  return train_main_weighted(data, split, bins, config, {});
}

std::vector<PairStrength> rank_interaction_pairs(const BinnedMatrix& coarse, std::span<const double> residuals,
                                                 RowRange rows) {
  const std::size_t n = coarse.cols();
  if (n < 2) throw DataError("interaction ranking needs at least two features");
  if (residuals.size() != coarse.rows || rows.end > coarse.rows) throw DataError("residual length mismatch");
  std::vector<PairStrength> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t feats[2] = {i, j};
      const GridHistogram h = GridHistogram::build(coarse, residuals, feats, rows);
      const std::size_t ri = h.dims[0], cj = h.dims[1];
      // Normal equations of the additive model a[u] + b[v] over the grid.
      const auto dim = static_cast<Eigen::Index>(ri + cj);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
      double full_fit = 0.0;
      for (std::size_t u = 0; u < ri; ++u) {
        for (std::size_t v = 0; v < cj; ++v) {
          const std::size_t c = h.cell(u, v);
          const double cnt = h.count[c];
          if (cnt <= 0.0) continue;
          const auto a = static_cast<Eigen::Index>(u);
          const auto b = static_cast<Eigen::Index>(ri + v);
          A(a, a) += cnt;
          A(b, b) += cnt;
          A(a, b) += cnt;
          A(b, a) += cnt;
          rhs(a) += h.sum[c];
          rhs(b) += h.sum[c];
          full_fit += h.sum[c] * h.sum[c] / cnt;
        }
      }
      const Eigen::VectorXd beta = A.completeOrthogonalDecomposition().solve(rhs);
      const double additive_fit = beta.dot(rhs);
      out.push_back({{i, j}, std::max(0.0, full_fit - additive_fit)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PairStrength& a, const PairStrength& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    return std::tie(a.pair.first, a.pair.second) < std::tie(b.pair.first, b.pair.second);
  });
  return out;
}

std::vector<FeaturePair> select_pairs(const std::vector<PairStrength>& ranked, std::size_t n_features,
                                      const InteractionBudget& budget) {
  const std::size_t k = std::min(budget.resolve(n_features), ranked.size());
  std::vector<FeaturePair> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].pair);
  std::sort(out.begin(), out.end(), [](const FeaturePair& a, const FeaturePair& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  return out;
}

GlassBoxModel train_interactions(GlassBoxModel partial, const SupervisedMatrix& data, const DataSplit& split,
                                 std::span<const double> residuals, std::span<const FeaturePair> pairs,
                                 const TrainConfig& config) {
  return train_interactions_weighted(std::move(partial), data, split, residuals, pairs, config, {});
}

GlassBoxModel train_glassbox(const SupervisedMatrix& data, const DataSplit& split, const TrainConfig& config) {
  check_training_inputs(data, split, config);
  const BinningMap bins = fit_bins(data.X, split.train, config.max_bins);
  if (config.bagging_count < 2) return train_single(data, split, bins, config, {});

  // Outer bags: bootstrap weights over the training rows, terms averaged.
  std::vector<GlassBoxModel> bags;
  for (std::size_t bag = 0; bag < config.bagging_count; ++bag) {
    std::mt19937_64 rng(config.seed + 0x9E3779B97F4A7C15ULL * (bag + 1));
    std::uniform_int_distribution<std::size_t> pick(split.train.begin, split.train.end - 1);
    std::vector<double> weights(data.rows(), 0.0);
    for (std::size_t i = 0; i < split.train.size(); ++i) weights[pick(rng)] += 1.0;
    bags.push_back(train_single(data, split, bins, config, weights));
  }
  GlassBoxModel model = bags.front();
  const double scale = 1.0 / static_cast<double>(bags.size());
  std::vector<FeaturePair> all_pairs;
  for (const auto& b : bags) {
    for (const auto& p : b.pairs) {
      if (std::find(all_pairs.begin(), all_pairs.end(), FeaturePair{p.first, p.second}) == all_pairs.end()) {
        all_pairs.push_back({p.first, p.second});
      }
    }
  }
  std::sort(all_pairs.begin(), all_pairs.end(), [](const FeaturePair& a, const FeaturePair& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  model.intercept = 0.0;
  for (auto& s : model.shapes) std::fill(s.values.begin(), s.values.end(), 0.0);
  model.pairs.clear();
  for (const auto& fp : all_pairs) {
    PairShapeFunction ps;
    ps.first = fp.first;
    ps.second = fp.second;
    ps.rows = model.pair_binning[fp.first].count;
    ps.cols = model.pair_binning[fp.second].count;
    ps.values.assign(ps.rows * ps.cols, 0.0);
    model.pairs.push_back(std::move(ps));
  }
  for (const auto& b : bags) {
    model.intercept += scale * b.intercept;
    for (std::size_t f = 0; f < model.shapes.size(); ++f) {
      for (std::size_t c = 0; c < model.shapes[f].values.size(); ++c) {
        model.shapes[f].values[c] += scale * b.shapes[f].values[c];
      }
    }
    for (const auto& bp : b.pairs) {
      auto it = std::find_if(model.pairs.begin(), model.pairs.end(),
                             [&](const PairShapeFunction& p) { return p.first == bp.first && p.second == bp.second; });
      for (std::size_t c = 0; c < bp.values.size(); ++c) it->values[c] += scale * bp.values[c];
    }
  }
  const BinnedMatrix binned = apply_bins(bins, data.X);
  center_main_effects(model, binned, split.train);
  center_pairs(model, coarsen(binned, model.pair_binning), split.train);
  return model;
}

double predict_row(const GlassBoxModel& model, std::span<const double> row) {
  std::vector<BinIndex> bins;
  return accumulate_terms(model, row, bins, [](std::size_t, double) {});
}

std::vector<double> predict(const GlassBoxModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.feature_count()) {
    throw ModelError("matrix has " + std::to_string(X.cols()) + " columns, model expects " +
                     std::to_string(model.feature_count()));
  }
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  std::vector<BinIndex> bins;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(r, c);
    out[static_cast<std::size_t>(r)] = accumulate_terms(model, row, bins, [](std::size_t, double) {});
  }
  return out;
}

Breakdown predict_with_breakdown(const GlassBoxModel& model, std::span<const double> row) {
  Breakdown out;
  out.intercept = model.intercept;
  std::vector<BinIndex> bins;
  out.forecast = accumulate_terms(model, row, bins, [&](std::size_t term, double v) {
    out.contributions.push_back({term, model.term_name(term), v});
  });
  return out;
}

std::vector<double> pair_population(const GlassBoxModel& model, const PairShapeFunction& pair, const Matrix& X,
                                    RowRange rows) {
  std::vector<double> pop(pair.values.size(), 0.0);
  for (std::size_t r = rows.begin; r < rows.end; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const auto a = model.pair_binning[pair.first].map[model.bins.features[pair.first].bin_of(X(ri, static_cast<Eigen::Index>(pair.first)))];
    const auto b = model.pair_binning[pair.second].map[model.bins.features[pair.second].bin_of(X(ri, static_cast<Eigen::Index>(pair.second)))];
    pop[a * pair.cols + b] += 1.0;
  }
  return pop;
}

}  // namespace windebm
