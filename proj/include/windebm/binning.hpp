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
#include <utility>
#include <vector>

#include "windebm/data.hpp"

namespace windebm {

using BinIndex = std::uint16_t;

// Quantile discretization of one feature. A value v falls in bin
// b = #{cuts <= v}, so bins are [cut[b-1], cut[b]) and values outside the
// fitted range land in the extreme bins.
struct FeatureBins {
  std::vector<double> cuts;  // strictly increasing interior cut points
  double lo = 0.0;           // smallest fitted value
  double hi = 0.0;           // largest fitted value
  std::vector<std::size_t> population;  // fitted rows per bin

  std::size_t bin_count() const { return cuts.size() + 1; }
  BinIndex bin_of(double value) const;
  // Midpoint of the bin's fitted extent; always maps back to the same bin.
  double center(std::size_t bin) const;
  // [lo, cuts..., hi]
  std::vector<double> edges() const;
};

struct BinningMap {
  std::size_t max_bins = 256;
  std::vector<FeatureBins> features;

  std::size_t size() const { return features.size(); }
};

// Column-major matrix of bin indices.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::vector<BinIndex>> columns;
  std::vector<std::size_t> bin_counts;  // per column

  std::size_t cols() const { return columns.size(); }
  BinIndex at(std::size_t row, std::size_t col) const { return columns[col][row]; }
};

FeatureBins fit_feature_bins(std::span<const double> values, std::size_t max_bins);
BinningMap fit_bins(const Matrix& X, RowRange train, std::size_t max_bins = 256);
BinnedMatrix apply_bins(const BinningMap& map, const Matrix& X);

// Re-quantizes a feature's bins into at most `coarse_bins` groups of
// contiguous bins with near-equal fitted population.
struct CoarseBinning {
  std::vector<BinIndex> map;  // fine bin -> coarse bin, non-decreasing
  std::size_t count = 1;

  // First and last fine bin of every coarse bin.
  std::pair<std::size_t, std::size_t> fine_span(std::size_t coarse) const;
};

CoarseBinning coarsen_bins(const FeatureBins& bins, std::size_t coarse_bins);
BinnedMatrix coarsen(const BinnedMatrix& fine, const std::vector<CoarseBinning>& coarse);

}  // namespace windebm
