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

#include "windebm/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <unordered_map>

#include "windebm/error.hpp"
#include "windebm/metrics.hpp"

namespace windebm {
namespace {

double axis_value(const GlassBoxModel& model, std::size_t feature, double normalized, bool denormalize) {
  if (!denormalize) return normalized;
  if (!model.norm) throw ModelError("model carries no normalization parameters");
  return model.norm->features.at(feature).invert(normalized);
}

std::vector<double> coarse_centers(const GlassBoxModel& model, std::size_t feature, bool denormalize) {
  const auto& cb = model.pair_binning[feature];
  const auto& fb = model.bins.features[feature];
  std::vector<double> out;
  for (std::size_t c = 0; c < cb.count; ++c) {
    const auto [first, last] = cb.fine_span(c);
    const double left = first == 0 ? fb.lo : fb.cuts[first - 1];
    const double right = last + 1 >= fb.bin_count() ? fb.hi : fb.cuts[last];
    out.push_back(axis_value(model, feature, 0.5 * (left + right), denormalize));
  }
  return out;
}

}  // namespace

std::vector<std::string> GlobalImportanceReport::ordering(bool include_pairs) const {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    if (include_pairs || !t.is_pair) out.push_back(t.name);
  }
  return out;
}

std::string LocalExplanation::summary_line(int precision) const {
  char buf[64];
  std::string line;
  if (actual) {
    std::snprintf(buf, sizeof(buf), "Actual(%.*f), ", precision, *actual);
    line += buf;
  }
  std::snprintf(buf, sizeof(buf), "Forecasts(%.*f) = %.*f", precision, forecast, precision, intercept);
  line += buf;
  for (const auto& c : contributions) {
    std::snprintf(buf, sizeof(buf), " %c %.*f", c.value < 0.0 ? '-' : '+', precision, std::abs(c.value));
    line += buf;
  }
  return line;
}

Predictor glassbox_predictor(const GlassBoxModel& model) {
  return [&model](const Matrix& X) { return predict(model, X); };
}

GlobalImportanceReport global_importance(const GlassBoxModel& model, const Matrix& reference) {
  if (reference.rows() == 0) throw DataError("empty reference set");
  if (static_cast<std::size_t>(reference.cols()) != model.feature_count()) throw ModelError("reference column mismatch");
  std::vector<double> totals(model.term_count(), 0.0);
  std::vector<double> row(model.feature_count());
  for (Eigen::Index r = 0; r < reference.rows(); ++r) {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = reference(r, static_cast<Eigen::Index>(c));
    const Breakdown b = predict_with_breakdown(model, row);
    for (const auto& c : b.contributions) totals[c.term] += std::abs(c.value);
  }
  GlobalImportanceReport report;
  const double n = static_cast<double>(reference.rows());
  for (std::size_t t = 0; t < totals.size(); ++t) {
    report.terms.push_back({t, model.term_name(t), t >= model.shapes.size(), totals[t] / n});
  }
  std::stable_sort(report.terms.begin(), report.terms.end(),
                   [](const TermScore& a, const TermScore& b) { return a.score > b.score; });
  return report;
}

LocalExplanation local_explanation(const GlassBoxModel& model, std::span<const double> row,
                                   std::optional<double> actual) {
  const Breakdown b = predict_with_breakdown(model, row);
  return {b.intercept, b.forecast, actual, b.sorted_by_magnitude()};
}

std::size_t find_feature(const GlassBoxModel& model, const std::string& name) {
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    if (model.feature_names[f] == name) return f;
  }
  std::string valid;
  for (const auto& n : model.feature_names) valid += (valid.empty() ? "" : ", ") + n;
  throw ModelError("unknown feature '" + name + "'; valid names: " + valid);
}

ShapeCurve export_shape(const GlassBoxModel& model, std::size_t feature, bool denormalize) {
  if (feature >= model.feature_count()) throw ModelError("unknown feature index " + std::to_string(feature));
  ShapeCurve curve;
  curve.feature = model.feature_names[feature];
  const auto& fb = model.bins.features[feature];
  for (std::size_t b = 0; b < fb.bin_count(); ++b) curve.centers.push_back(axis_value(model, feature, fb.center(b), denormalize));
  curve.values = model.shapes[feature].values;
  return curve;
}

PairHeatmap export_pair_heatmap(const GlassBoxModel& model, FeaturePair pair, bool denormalize) {
  const auto it = std::find_if(model.pairs.begin(), model.pairs.end(), [&](const PairShapeFunction& p) {
    return (p.first == pair.first && p.second == pair.second) || (p.first == pair.second && p.second == pair.first);
  });
  if (it == model.pairs.end()) {
    throw ModelError("model has no interaction term for pair (" + std::to_string(pair.first) + "," +
                     std::to_string(pair.second) + ")");
  }
  PairHeatmap map;
  map.first = model.feature_names[it->first];
  map.second = model.feature_names[it->second];
  map.row_centers = coarse_centers(model, it->first, denormalize);
  map.col_centers = coarse_centers(model, it->second, denormalize);
  map.values = it->values;
  return map;
}

std::vector<double> bin_center_grid(const GlassBoxModel& model, std::size_t feature) {
  return export_shape(model, feature, false).centers;
}

std::vector<double> pdp(const Predictor& predictor, const Matrix& X, std::size_t feature, std::span<const double> grid) {
  if (grid.empty()) throw DataError("empty PDP grid");
  if (X.rows() == 0) throw DataError("empty PDP data");
  if (feature >= static_cast<std::size_t>(X.cols())) throw ModelError("PDP feature out of range");
  Matrix work = X;
  std::vector<double> curve;
  curve.reserve(grid.size());
  for (double v : grid) {
    work.col(static_cast<Eigen::Index>(feature)).setConstant(v);
    const auto forecasts = predictor(work);
    curve.push_back(std::accumulate(forecasts.begin(), forecasts.end(), 0.0) / static_cast<double>(forecasts.size()));
  }
  return curve;
}

std::vector<double> pdp_importance(const Predictor& predictor, const Matrix& X,
                                   const std::vector<std::vector<double>>& grids) {
  if (grids.size() != static_cast<std::size_t>(X.cols())) throw DataError("one PDP grid per feature required");
  std::vector<double> out;
  for (std::size_t f = 0; f < grids.size(); ++f) {
    const auto curve = pdp(predictor, X, f, grids[f]);
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    out.push_back(*hi - *lo);
  }
  return out;
}

std::vector<double> pfi(const Predictor& predictor, const Matrix& X, std::span<const double> y, const Metric& metric,
                        std::size_t n_repeats, std::uint64_t seed) {
  if (n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw DataError("PFI: X and y lengths differ");
  if (X.rows() == 0) throw DataError("PFI: empty data");
  const double base = metric(predictor(X), y);
  std::vector<double> out;
  Matrix work = X;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    double total = 0.0;
    for (std::size_t rep = 0; rep < n_repeats; ++rep) {
      // Each (feature, repeat) draws from its own stream, so results do not
      // depend on evaluation order.
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(rep)};
      std::mt19937_64 rng(seq);
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      for (Eigen::Index r = 0; r < X.rows(); ++r) work(r, f) = X(perm[static_cast<std::size_t>(r)], f);
      total += metric(predictor(work), y) - base;
    }
    work.col(f) = X.col(f);
    out.push_back(total / static_cast<double>(n_repeats));
  }
  return out;
}

std::vector<double> pfi(const Predictor& predictor, const Matrix& X, std::span<const double> y, std::size_t n_repeats,
                        std::uint64_t seed) {
  return pfi(predictor, X, y, [](std::span<const double> f, std::span<const double> a) { return nrmse(f, a); },
             n_repeats, seed);
}

std::vector<std::string> ordering_from_scores(const std::vector<std::string>& names, std::span<const double> scores) {
  if (names.size() != scores.size()) throw DataError("names and scores differ in length");
  std::vector<std::size_t> idx(names.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(names[i]);
  return out;
}

RankingAgreement ranking_consistency(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) throw DataError("rankings cover different term sets");
  std::unordered_map<std::string, std::size_t> rank_b;
  for (std::size_t i = 0; i < b.size(); ++i) rank_b[b[i]] = i;
  if (rank_b.size() != b.size()) throw DataError("ranking contains duplicate terms");
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = rank_b.find(a[i]);
    if (it == rank_b.end()) throw DataError("term '" + a[i] + "' missing from the other ranking");
    const double d = static_cast<double>(i) - static_cast<double>(it->second);
    d2 += d * d;
  }
  RankingAgreement out;
  out.exact_match = a == b;
  const double n = static_cast<double>(a.size());
  out.rank_correlation = a.size() < 2 ? 1.0 : 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
  return out;
}

}  // namespace windebm
