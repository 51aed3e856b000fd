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

#ifndef NALM_FOREST_HPP_
#define NALM_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nalm/features.hpp"

namespace nalm {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 5;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Node of a binary decision tree over binned features. Trees are stored in
/// preorder; a split sends `bin(x[feature]) <= threshold_bin` to `left`.
struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  std::uint8_t threshold_bin = 0;
  bool on = false;  // leaf class
  std::uint32_t left = 0;
  std::uint32_t right = 0;

  bool is_leaf() const { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  /// `bins` holds one bin index per feature.
  bool predict(std::span<const std::uint8_t> bins) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// Training data for one binary problem.
struct BinaryProblem {
  const BinnedMatrix* features = nullptr;
  std::span<const std::size_t> bin_counts;  // bins per feature
  const std::vector<bool>* labels = nullptr;
  /// Per-class example weight, {OFF, ON}.
  double class_weight[2] = {1.0, 1.0};
};

/// Grows one tree on a bootstrap sample drawn from `rng_seed`: Gini splits
/// over ceil(sqrt(d)) features sampled per node, majority (by weight) leaves.
DecisionTree grow_tree(const BinaryProblem& problem, const ForestParams& params,
                       std::uint64_t rng_seed);

/// Random decision forest; ON wins a strict majority of tree votes.
struct Forest {
  std::vector<DecisionTree> trees;

  std::size_t votes(std::span<const std::uint8_t> bins) const;
  bool predict(std::span<const std::uint8_t> bins) const {
    return 2 * votes(bins) > trees.size();
  }
  friend bool operator==(const Forest&, const Forest&) = default;
};

}  // namespace nalm

#endif  // NALM_FOREST_HPP_
