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
#include <span>
#include <vector>

#include "windebm/binning.hpp"

namespace windebm {

enum class SplitCriterion { kSse, kMae };

struct TreeParams {
  int max_depth = 2;
  std::size_t min_samples_split = 5;
  std::size_t min_samples_leaf = 1;
  SplitCriterion criterion = SplitCriterion::kSse;

  void validate() const;
};

// Internal nodes send bin <= threshold left. Leaves have feature < 0.
struct TreeNode {
  int feature = -1;
  BinIndex threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf constant (mean for SSE, median for MAE)
  double count = 0.0;  // training rows (or weight) reaching the node

  bool leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root, preorder

  std::size_t leaf_count() const;
  int depth() const;
  std::size_t max_feature_index() const;

  // bin_of(feature) -> bin of the row being routed.
  template <class BinOf>
  const TreeNode& route(BinOf&& bin_of) const {
    const TreeNode* node = &nodes.front();
    while (!node->leaf()) {
      node = &nodes[static_cast<std::size_t>(bin_of(static_cast<std::size_t>(node->feature)) <= node->threshold
                                                 ? node->left
                                                 : node->right)];
    }
    return *node;
  }

  double predict_row(const BinnedMatrix& X, std::size_t row) const {
    return route([&](std::size_t f) { return X.columns[f][row]; }).value;
  }
};

// Dense target sums over the joint bins of one or two features. Every
// restricted tree is a function of this histogram alone.
struct GridHistogram {
  std::vector<std::size_t> features;  // ascending, size 1 or 2
  std::vector<std::size_t> dims;      // bin count per feature
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::vector<double> count;

  static GridHistogram build(const BinnedMatrix& X, std::span<const double> target,
                             std::span<const std::size_t> features, RowRange rows,
                             std::span<const double> weights = {});
  std::size_t cell(std::size_t a, std::size_t b) const { return a * (dims.size() > 1 ? dims[1] : 1) + b; }
};

RegressionTree fit_tree_from_histogram(const GridHistogram& hist, const TreeParams& params);

// Greedy CART over all features of X using rows in `rows` (default: all).
// Among equal gains the lowest feature, then the lowest threshold, wins.
RegressionTree fit_cart(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params,
                        RowRange rows);
RegressionTree fit_cart(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params);

// fit_cart restricted to one or two features (SSE only).
RegressionTree fit_restricted_tree(const BinnedMatrix& X, std::span<const double> residuals,
                                   std::span<const std::size_t> allowed, const TreeParams& params,
                                   RowRange rows);

std::vector<double> predict_tree(const RegressionTree& tree, const BinnedMatrix& X);

// Evaluates a tree over every bin (1 feature) or bin pair (2 features,
// row-major with the first feature as the row). Throws ModelError if the
// tree splits on any other feature.
std::vector<double> tree_as_bin_table(const RegressionTree& tree, std::span<const std::size_t> features,
                                      std::span<const std::size_t> bin_counts);

}  // namespace windebm
