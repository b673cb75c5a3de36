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

#include "windebm/tree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

#include "windebm/error.hpp"

namespace windebm {
namespace {

// Splits whose gain is below this fraction of the node's sum of squares are
// treated as zero gain; it sits above the cancellation noise of the gain formula.
constexpr double kRelativeMinGain = 1e-12;

TreeNode make_leaf(double value, double count) {
  TreeNode node;
  node.value = value;
  node.count = count;
  return node;
}

struct Box {
  std::size_t lo[2] = {0, 0};
  std::size_t hi[2] = {0, 0};  // inclusive
};

class GridTreeBuilder {
 public:
  GridTreeBuilder(const GridHistogram& hist, const TreeParams& params) : hist_(hist), params_(params) {}

  RegressionTree build() {
    Box root;
    for (std::size_t a = 0; a < hist_.dims.size(); ++a) root.hi[a] = hist_.dims[a] - 1;
    grow(root, 0);
    return std::move(tree_);
  }

 private:
  int grow(const Box& box, int depth) {
    double s = 0.0, q = 0.0, n = 0.0;
    for (std::size_t a = box.lo[0]; a <= box.hi[0]; ++a) {
      for (std::size_t b = box.lo[1]; b <= box.hi[1]; ++b) {
        const std::size_t c = hist_.cell(a, b);
        s += hist_.sum[c];
        q += hist_.sum_sq[c];
        n += hist_.count[c];
      }
    }
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(make_leaf(n > 0.0 ? s / n : 0.0, n));
    if (depth >= params_.max_depth || n < static_cast<double>(params_.min_samples_split)) return index;

    const double min_leaf = static_cast<double>(params_.min_samples_leaf);
    const double parent = s * s / n;
    double best_gain = kRelativeMinGain * q;
    std::size_t best_axis = 0, best_threshold = 0;
    bool found = false;
    std::vector<double> msum, mcount;
    for (std::size_t axis = 0; axis < hist_.dims.size(); ++axis) {
      const std::size_t other = 1 - axis;
      const std::size_t lo = box.lo[axis], hi = box.hi[axis];
      msum.assign(hi - lo + 1, 0.0);
      mcount.assign(hi - lo + 1, 0.0);
      for (std::size_t t = lo; t <= hi; ++t) {
        for (std::size_t u = box.lo[other]; u <= box.hi[other]; ++u) {
          const std::size_t c = axis == 0 ? hist_.cell(t, u) : hist_.cell(u, t);
          msum[t - lo] += hist_.sum[c];
          mcount[t - lo] += hist_.count[c];
        }
      }
      double ls = 0.0, ln = 0.0;
      for (std::size_t t = lo; t < hi; ++t) {
        ls += msum[t - lo];
        ln += mcount[t - lo];
        const double rn = n - ln;
        if (ln < min_leaf || rn < min_leaf || ln <= 0.0 || rn <= 0.0) continue;
        const double rs = s - ls;
        const double gain = ls * ls / ln + rs * rs / rn - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_axis = axis;
          best_threshold = t;
          found = true;
        }
      }
    }
    if (!found) return index;

    Box left = box, right = box;
    left.hi[best_axis] = best_threshold;
    right.lo[best_axis] = best_threshold + 1;
    tree_.nodes[static_cast<std::size_t>(index)].feature = static_cast<int>(hist_.features[best_axis]);
    tree_.nodes[static_cast<std::size_t>(index)].threshold = static_cast<BinIndex>(best_threshold);
    const int l = grow(left, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].left = l;
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  const GridHistogram& hist_;
  const TreeParams& params_;
  RegressionTree tree_;
};

// Streaming median with sum of absolute deviations, insert-only.
class RunningMedian {
 public:
  void insert(double v) {
    if (low_.empty() || v <= low_.top()) {
      low_.push(v);
      low_sum_ += v;
    } else {
      high_.push(v);
      high_sum_ += v;
    }
    if (low_.size() > high_.size() + 1) {
      const double t = low_.top();
      low_.pop();
      low_sum_ -= t;
      high_.push(t);
      high_sum_ += t;
    } else if (high_.size() > low_.size()) {
      const double t = high_.top();
      high_.pop();
      high_sum_ -= t;
      low_.push(t);
      low_sum_ += t;
    }
  }

  std::size_t size() const { return low_.size() + high_.size(); }

  double abs_deviation() const {
    if (low_.empty()) return 0.0;
    const double m = low_.top();
    return m * static_cast<double>(low_.size()) - low_sum_ + high_sum_ - m * static_cast<double>(high_.size());
  }

 private:
  std::priority_queue<double> low_;
  std::priority_queue<double, std::vector<double>, std::greater<>> high_;
  double low_sum_ = 0.0;
  double high_sum_ = 0.0;
};

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

class RowTreeBuilder {
 public:
  RowTreeBuilder(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params)
      : X_(X), y_(y), params_(params) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    std::size_t threshold = 0;
  };

  int grow(const std::vector<std::size_t>& rows, int depth) {
    const double n = static_cast<double>(rows.size());
    double s = 0.0, q = 0.0;
    for (auto r : rows) {
      s += y_[r];
      q += y_[r] * y_[r];
    }
    const bool mae = params_.criterion == SplitCriterion::kMae;
    double value = s / n;
    if (mae) {
      std::vector<double> vals;
      vals.reserve(rows.size());
      for (auto r : rows) vals.push_back(y_[r]);
      value = median_of(std::move(vals));
    }
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(make_leaf(value, n));
    if (depth >= params_.max_depth || rows.size() < params_.min_samples_split) return index;

    const Split split = mae ? best_mae_split(rows) : best_sse_split(rows, s, q);
    if (!split.found) return index;

    std::vector<std::size_t> left, right;
    const auto& col = X_.columns[split.feature];
    for (auto r : rows) (col[r] <= split.threshold ? left : right).push_back(r);
    tree_.nodes[static_cast<std::size_t>(index)].feature = static_cast<int>(split.feature);
    tree_.nodes[static_cast<std::size_t>(index)].threshold = static_cast<BinIndex>(split.threshold);
    const int l = grow(left, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].left = l;
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  Split best_sse_split(const std::vector<std::size_t>& rows, double s, double q) const {
    const double n = static_cast<double>(rows.size());
    const double min_leaf = static_cast<double>(params_.min_samples_leaf);
    const double parent = s * s / n;
    double best_gain = kRelativeMinGain * q;
    Split best;
    std::vector<double> hsum, hcount;
    for (std::size_t f = 0; f < X_.cols(); ++f) {
      const std::size_t bins = X_.bin_counts[f];
      hsum.assign(bins, 0.0);
      hcount.assign(bins, 0.0);
      const auto& col = X_.columns[f];
      for (auto r : rows) {
        const std::size_t b = std::min<std::size_t>(col[r], bins - 1);
        hsum[b] += y_[r];
        hcount[b] += 1.0;
      }
      double ls = 0.0, ln = 0.0;
      for (std::size_t t = 0; t + 1 < bins; ++t) {
        ls += hsum[t];
        ln += hcount[t];
        const double rn = n - ln;
        if (ln < min_leaf || rn < min_leaf || ln <= 0.0 || rn <= 0.0) continue;
        const double rs = s - ls;
        const double gain = ls * ls / ln + rs * rs / rn - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best = {true, f, t};
        }
      }
    }
    return best;
  }

  Split best_mae_split(const std::vector<std::size_t>& rows) const {
    const std::size_t min_leaf = params_.min_samples_leaf;
    RunningMedian all;
    double abs_sum = 0.0;
    for (auto r : rows) {
      all.insert(y_[r]);
      abs_sum += std::abs(y_[r]);
    }
    const double parent = all.abs_deviation();
    double best_gain = kRelativeMinGain * abs_sum;
    Split best;
    std::vector<std::vector<double>> buckets;
    std::vector<double> left_dev;
    std::vector<std::size_t> left_n;
    for (std::size_t f = 0; f < X_.cols(); ++f) {
      const std::size_t bins = X_.bin_counts[f];
      buckets.assign(bins, {});
      const auto& col = X_.columns[f];
      for (auto r : rows) buckets[std::min<std::size_t>(col[r], bins - 1)].push_back(y_[r]);
      left_dev.assign(bins, 0.0);
      left_n.assign(bins, 0);
      RunningMedian left;
      for (std::size_t t = 0; t + 1 < bins; ++t) {
        for (double v : buckets[t]) left.insert(v);
        left_dev[t] = left.abs_deviation();
        left_n[t] = left.size();
      }
      RunningMedian right;
      std::vector<double> right_dev(bins, 0.0);
      for (std::size_t t = bins - 1; t >= 1; --t) {
        for (double v : buckets[t]) right.insert(v);
        right_dev[t - 1] = right.abs_deviation();
      }
      for (std::size_t t = 0; t + 1 < bins; ++t) {
        const std::size_t ln = left_n[t];
        const std::size_t rn = rows.size() - ln;
        if (ln < min_leaf || rn < min_leaf || ln == 0 || rn == 0) continue;
        const double gain = parent - left_dev[t] - right_dev[t];
        if (gain > best_gain) {
          best_gain = gain;
          best = {true, f, t};
        }
      }
    }
    return best;
  }

  const BinnedMatrix& X_;
  std::span<const double> y_;
  const TreeParams& params_;
  RegressionTree tree_;
};

void check_fit_inputs(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params, RowRange rows) {
  params.validate();
  if (y.size() != X.rows) throw DataError("target length does not match row count");
  if (rows.empty() || rows.end > X.rows) throw DataError("cannot fit a tree on empty data");
}

}  // namespace

void TreeParams::validate() const {
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf(); }));
}

int RegressionTree::depth() const {
  std::function<int(int)> walk = [&](int i) -> int {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    return n.leaf() ? 0 : 1 + std::max(walk(n.left), walk(n.right));
  };
  return nodes.empty() ? 0 : walk(0);
}

std::size_t RegressionTree::max_feature_index() const {
  std::size_t m = 0;
  for (const auto& n : nodes) {
    if (!n.leaf()) m = std::max(m, static_cast<std::size_t>(n.feature));
  }
  return m;
}

GridHistogram GridHistogram::build(const BinnedMatrix& X, std::span<const double> target,
                                   std::span<const std::size_t> features, RowRange rows,
                                   std::span<const double> weights) {
  if (features.empty() || features.size() > 2) throw ConfigError("restricted trees take one or two features");
  GridHistogram h;
  h.features.assign(features.begin(), features.end());
  std::sort(h.features.begin(), h.features.end());
  if (h.features.size() == 2 && h.features[0] == h.features[1]) throw ConfigError("duplicate feature in pair");
  for (auto f : h.features) {
    if (f >= X.cols()) throw ModelError("feature index out of range");
    h.dims.push_back(X.bin_counts[f]);
  }
  const std::size_t cells = h.dims[0] * (h.dims.size() > 1 ? h.dims[1] : 1);
  h.sum.assign(cells, 0.0);
  h.sum_sq.assign(cells, 0.0);
  h.count.assign(cells, 0.0);
  const auto& c0 = X.columns[h.features[0]];
  const std::size_t d0 = h.dims[0] - 1;
  if (h.features.size() == 1) {
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      const std::size_t c = std::min<std::size_t>(c0[r], d0);
      const double w = weights.empty() ? 1.0 : weights[r];
      const double t = target[r];
      h.sum[c] += w * t;
      h.sum_sq[c] += w * t * t;
      h.count[c] += w;
    }
  } else {
    const auto& c1 = X.columns[h.features[1]];
    const std::size_t d1 = h.dims[1] - 1;
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      const std::size_t c = h.cell(std::min<std::size_t>(c0[r], d0), std::min<std::size_t>(c1[r], d1));
      const double w = weights.empty() ? 1.0 : weights[r];
      const double t = target[r];
      h.sum[c] += w * t;
      h.sum_sq[c] += w * t * t;
      h.count[c] += w;
    }
  }
  return h;
}

RegressionTree fit_tree_from_histogram(const GridHistogram& hist, const TreeParams& params) {
  params.validate();
  if (params.criterion != SplitCriterion::kSse) throw ConfigError("histogram trees support the SSE criterion only");
  return GridTreeBuilder(hist, params).build();
}

RegressionTree fit_cart(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params, RowRange rows) {
  check_fit_inputs(X, y, params, rows);
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), rows.begin);
  return RowTreeBuilder(X, y, params).build(std::move(idx));
}

RegressionTree fit_cart(const BinnedMatrix& X, std::span<const double> y, const TreeParams& params) {
  return fit_cart(X, y, params, RowRange{0, X.rows});
}

RegressionTree fit_restricted_tree(const BinnedMatrix& X, std::span<const double> residuals,
                                   std::span<const std::size_t> allowed, const TreeParams& params,
                                   RowRange rows) {
  check_fit_inputs(X, residuals, params, rows);
  return fit_tree_from_histogram(GridHistogram::build(X, residuals, allowed, rows), params);
}

std::vector<double> predict_tree(const RegressionTree& tree, const BinnedMatrix& X) {
  if (tree.nodes.empty()) throw ModelError("empty tree");
  if (tree.max_feature_index() >= X.cols() && tree.nodes.size() > 1) throw ModelError("tree feature index out of range");
  std::vector<double> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = tree.predict_row(X, r);
  return out;
}

std::vector<double> tree_as_bin_table(const RegressionTree& tree, std::span<const std::size_t> features,
                                      std::span<const std::size_t> bin_counts) {
  if (features.empty() || features.size() > 2 || bin_counts.size() != features.size()) {
    throw ModelError("bin tables take one or two features");
  }
  for (const auto& n : tree.nodes) {
    if (!n.leaf() && std::find(features.begin(), features.end(), static_cast<std::size_t>(n.feature)) == features.end()) {
      throw ModelError("tree references feature " + std::to_string(n.feature) + " outside the table's features");
    }
  }
  if (features.size() == 1) {
    std::vector<double> table(bin_counts[0]);
    for (std::size_t b = 0; b < bin_counts[0]; ++b) table[b] = tree.route([&](std::size_t) { return b; }).value;
    return table;
  }
  std::vector<double> table(bin_counts[0] * bin_counts[1]);
  for (std::size_t a = 0; a < bin_counts[0]; ++a) {
    for (std::size_t b = 0; b < bin_counts[1]; ++b) {
      table[a * bin_counts[1] + b] = tree.route([&](std::size_t f) { return f == features[0] ? a : b; }).value;
    }
  }
  return table;
}

}  // namespace windebm
