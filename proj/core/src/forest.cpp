// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nalm/forest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "nalm/random.hpp"

namespace nalm {
namespace {

double gini_weighted(double w0, double w1) {
  const double total = w0 + w1;
  if (total <= 0.0) return 0.0;
  return total - (w0 * w0 + w1 * w1) / total;  // total * gini
}

struct Sample {
  std::uint32_t index;
  std::uint32_t draws;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinaryProblem& problem, const ForestParams& params,
              std::uint64_t seed)
      : problem_(problem), params_(params), rng_(seed) {
    const std::size_t d = problem.features->cols;
    candidates_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    feature_order_.resize(d);
  }

  DecisionTree build() {
    const std::size_t n = problem_.features->rows;
    std::vector<std::uint32_t> draws(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++draws[draw_below(rng_, n)];
    samples_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (draws[i] > 0) samples_.push_back({static_cast<std::uint32_t>(i), draws[i]});
    }
    grow(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  double weight(const Sample& s) const {
    return s.draws * problem_.class_weight[(*problem_.labels)[s.index] ? 1 : 0];
  }

  std::uint32_t grow(std::size_t begin, std::size_t end, int depth) {
    const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    double w[2] = {0.0, 0.0};
    std::uint64_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      w[(*problem_.labels)[samples_[i].index] ? 1 : 0] += weight(samples_[i]);
      count += samples_[i].draws;
    }
    tree_.nodes[id].on = w[1] > w[0];

    const auto min_leaf = static_cast<std::uint64_t>(std::max(1, params_.min_leaf));
    if (depth >= params_.max_depth || w[0] <= 0.0 || w[1] <= 0.0 ||
        count < 2 * min_leaf) {
      return id;
    }

    const double parent = gini_weighted(w[0], w[1]);
    double best_impurity = parent;
    std::int32_t best_feature = TreeNode::kLeaf;
    std::uint8_t best_bin = 0;

    std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
    const std::size_t d = feature_order_.size();
    for (std::size_t k = 0; k < candidates_ && k < d; ++k) {
      std::swap(feature_order_[k], feature_order_[k + draw_below(rng_, d - k)]);
      const std::size_t f = feature_order_[k];
      const std::size_t nbins = problem_.bin_counts[f];
      if (nbins < 2) continue;

      hist_w0_.assign(nbins, 0.0);
      hist_w1_.assign(nbins, 0.0);
      hist_n_.assign(nbins, 0);
      const auto column = problem_.features->column(f);
      for (std::size_t i = begin; i < end; ++i) {
        const auto& s = samples_[i];
        const auto b = column[s.index];
        if ((*problem_.labels)[s.index]) {
          hist_w1_[b] += weight(s);
        } else {
          hist_w0_[b] += weight(s);
        }
        hist_n_[b] += s.draws;
      }

      double l0 = 0.0, l1 = 0.0;
      std::uint64_t ln = 0;
      for (std::size_t b = 0; b + 1 < nbins; ++b) {
        l0 += hist_w0_[b];
        l1 += hist_w1_[b];
        ln += hist_n_[b];
        if (ln < min_leaf) continue;
        if (count - ln < min_leaf) break;
        const double impurity =
            gini_weighted(l0, l1) + gini_weighted(w[0] - l0, w[1] - l1);
        if (impurity < best_impurity - 1e-12 * parent) {
          best_impurity = impurity;
          best_feature = static_cast<std::int32_t>(f);
          best_bin = static_cast<std::uint8_t>(b);
        }
      }
    }
    if (best_feature == TreeNode::kLeaf) return id;

    const auto column = problem_.features->column(static_cast<std::size_t>(best_feature));
    const auto mid = std::stable_partition(
        samples_.begin() + static_cast<std::ptrdiff_t>(begin),
        samples_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](const Sample& s) { return column[s.index] <= best_bin; });
    const auto split = static_cast<std::size_t>(mid - samples_.begin());

    tree_.nodes[id].feature = best_feature;
    tree_.nodes[id].threshold_bin = best_bin;
    const auto left = grow(begin, split, depth + 1);
    const auto right = grow(split, end, depth + 1);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  const BinaryProblem& problem_;
  const ForestParams& params_;
  std::mt19937_64 rng_;
  std::size_t candidates_ = 1;
  std::vector<std::size_t> feature_order_;
  std::vector<Sample> samples_;
  std::vector<double> hist_w0_, hist_w1_;
  std::vector<std::uint64_t> hist_n_;
  DecisionTree tree_;
};

}  // namespace

bool DecisionTree::predict(std::span<const std::uint8_t> bins) const {
  std::uint32_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& node = nodes[i];
    i = bins[static_cast<std::size_t>(node.feature)] <= node.threshold_bin ? node.left
                                                                           : node.right;
  }
  return nodes[i].on;
}

DecisionTree grow_tree(const BinaryProblem& problem, const ForestParams& params,
                       std::uint64_t rng_seed) {
  return TreeBuilder(problem, params, rng_seed).build();
}

std::size_t Forest::votes(std::span<const std::uint8_t> bins) const {
  std::size_t on = 0;
  for (const auto& tree : trees) on += tree.predict(bins) ? 1 : 0;
  return on;
}

}  // namespace nalm
