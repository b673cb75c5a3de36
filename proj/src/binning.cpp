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

#include "windebm/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace windebm {

BinIndex FeatureBins::bin_of(double value) const {
  return static_cast<BinIndex>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

double FeatureBins::center(std::size_t bin) const {
  const double left = bin == 0 ? lo : cuts[bin - 1];
  const double right = bin + 1 >= bin_count() ? hi : cuts[bin];
  return 0.5 * (left + right);
}

std::vector<double> FeatureBins::edges() const {
  std::vector<double> out;
  out.reserve(cuts.size() + 2);
  out.push_back(lo);
  out.insert(out.end(), cuts.begin(), cuts.end());
  if (hi > lo) out.push_back(hi);
  return out;
}

FeatureBins fit_feature_bins(std::span<const double> values, std::size_t max_bins) {
  if (max_bins < 2) throw ConfigError("max_bins must be >= 2");
  if (max_bins > std::numeric_limits<BinIndex>::max()) throw ConfigError("max_bins too large");
  if (values.empty()) throw DataError("cannot fit bins on an empty range");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  FeatureBins fb;
  fb.lo = sorted.front();
  fb.hi = sorted.back();

  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(0);
    }
    ++counts.back();
  }
  const std::size_t n = sorted.size();
  if (distinct.size() <= max_bins) {
    for (std::size_t i = 1; i < distinct.size(); ++i) fb.cuts.push_back(0.5 * (distinct[i - 1] + distinct[i]));
  } else {
    // Cut where the cumulative count first reaches k*n/max_bins, always on a
    // boundary between distinct values.
    std::size_t k = 1;
    std::size_t cum = 0;
    for (std::size_t i = 0; i + 1 < distinct.size() && k < max_bins; ++i) {
      cum += counts[i];
      const double target = static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(max_bins);
      if (static_cast<double>(cum) >= target) {
        fb.cuts.push_back(0.5 * (distinct[i] + distinct[i + 1]));
        while (k < max_bins &&
               static_cast<double>(cum) >= static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(max_bins)) {
          ++k;
        }
      }
    }
  }
  fb.population.assign(fb.bin_count(), 0);
  for (double v : values) ++fb.population[fb.bin_of(v)];
  return fb;
}

BinningMap fit_bins(const Matrix& X, RowRange train, std::size_t max_bins) {
  if (max_bins < 2) throw ConfigError("max_bins must be >= 2");
  if (train.empty() || train.end > static_cast<std::size_t>(X.rows())) throw DataError("invalid binning range");
  BinningMap map;
  map.max_bins = max_bins;
  std::vector<double> col(train.size());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    for (std::size_t r = 0; r < train.size(); ++r) col[r] = X(static_cast<Eigen::Index>(train.begin + r), c);
    map.features.push_back(fit_feature_bins(col, max_bins));
  }
  return map;
}

BinnedMatrix apply_bins(const BinningMap& map, const Matrix& X) {
  if (map.size() != static_cast<std::size_t>(X.cols())) throw ModelError("binning map column count mismatch");
  BinnedMatrix out;
  out.rows = static_cast<std::size_t>(X.rows());
  out.columns.resize(map.size());
  for (std::size_t c = 0; c < map.size(); ++c) {
    const auto& fb = map.features[c];
    auto& col = out.columns[c];
    col.resize(out.rows);
    for (std::size_t r = 0; r < out.rows; ++r) col[r] = fb.bin_of(X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    out.bin_counts.push_back(fb.bin_count());
  }
  return out;
}

std::pair<std::size_t, std::size_t> CoarseBinning::fine_span(std::size_t coarse) const {
  const auto first = std::lower_bound(map.begin(), map.end(), static_cast<BinIndex>(coarse));
  const auto last = std::upper_bound(map.begin(), map.end(), static_cast<BinIndex>(coarse));
  return {static_cast<std::size_t>(first - map.begin()), static_cast<std::size_t>(last - map.begin()) - 1};
}

CoarseBinning coarsen_bins(const FeatureBins& bins, std::size_t coarse_bins) {
  if (coarse_bins < 1) throw ConfigError("pair_bins must be >= 1");
  CoarseBinning cb;
  const std::size_t fine = bins.bin_count();
  cb.map.resize(fine);
  if (fine <= coarse_bins) {
    for (std::size_t b = 0; b < fine; ++b) cb.map[b] = static_cast<BinIndex>(b);
    cb.count = fine;
    return cb;
  }
  double total = 0.0;
  for (auto p : bins.population) total += static_cast<double>(p);
  if (total <= 0.0) total = 1.0;
  // Each fine bin goes to the coarse quantile holding its population midpoint.
  double cum = 0.0;
  std::vector<std::size_t> raw(fine);
  for (std::size_t b = 0; b < fine; ++b) {
    const double pop = b < bins.population.size() ? static_cast<double>(bins.population[b]) : 0.0;
    const double mid = cum + 0.5 * pop;
    raw[b] = std::min(coarse_bins - 1, static_cast<std::size_t>(mid * static_cast<double>(coarse_bins) / total));
    cum += pop;
  }
  // Renumber so coarse ids are consecutive.
  std::size_t next = 0;
  for (std::size_t b = 0; b < fine; ++b) {
    if (b > 0 && raw[b] != raw[b - 1]) ++next;
    cb.map[b] = static_cast<BinIndex>(next);
  }
  cb.count = next + 1;
  return cb;
}

BinnedMatrix coarsen(const BinnedMatrix& fine, const std::vector<CoarseBinning>& coarse) {
  if (coarse.size() != fine.cols()) throw ModelError("coarse binning column count mismatch");
  BinnedMatrix out;
  out.rows = fine.rows;
  out.columns.resize(fine.cols());
  for (std::size_t c = 0; c < fine.cols(); ++c) {
    const auto& map = coarse[c].map;
    out.columns[c].resize(fine.rows);
    for (std::size_t r = 0; r < fine.rows; ++r) {
      const BinIndex b = fine.columns[c][r];
      out.columns[c][r] = map[std::min<std::size_t>(b, map.size() - 1)];
    }
    out.bin_counts.push_back(coarse[c].count);
  }
  return out;
}

}  // namespace windebm
