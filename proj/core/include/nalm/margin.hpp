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

#ifndef NALM_MARGIN_HPP_
#define NALM_MARGIN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nalm/features.hpp"

namespace nalm {

struct MarginParams {
  int epochs = 20;
  double learning_rate = 0.01;
  double regularization = 1e-4;

  friend bool operator==(const MarginParams&, const MarginParams&) = default;
};

/// Linear hinge-loss classifier over standardized features plus one
/// indicator per (feature, bin) pair. The indicators give the linear model
/// a piecewise-constant response to each input, which is what lets it pick
/// out a power level that lies between two others.
struct MarginClassifier {
  std::vector<double> dense_weights;  // one per standardized feature
  std::vector<double> bin_weights;    // concatenated per-feature bin blocks
  std::vector<std::uint32_t> bin_offsets;  // start of each feature's block
  double bias = 0.0;

  double decision(std::span<const double> standardized,
                  std::span<const std::uint8_t> bins) const;
  bool predict(std::span<const double> standardized,
               std::span<const std::uint8_t> bins) const {
    return decision(standardized, bins) > 0.0;
  }
  friend bool operator==(const MarginClassifier&, const MarginClassifier&) = default;
};

struct MarginProblem {
  const FeatureMatrix* standardized = nullptr;  // row-major
  const BinnedMatrix* binned = nullptr;         // column-major
  std::span<const std::size_t> bin_counts;
  const std::vector<bool>* labels = nullptr;
  double class_weight[2] = {1.0, 1.0};
};

struct MarginFit {
  MarginClassifier classifier;
  /// Regularized weighted hinge objective after each epoch.
  std::vector<double> epoch_objective;
};

/// Stochastic subgradient descent on the L2-regularized hinge loss. Each
/// epoch visits the examples in a fresh shuffled order drawn from
/// `rng_seed`; epoch e (from 0) uses step size lr / (1 + e).
MarginFit train_margin(const MarginProblem& problem, const MarginParams& params,
                       std::uint64_t rng_seed);

/// lambda/2 * |w|^2 + weighted mean of max(0, 1 - y * f(x)).
double margin_objective(const MarginClassifier& classifier,
                        const MarginProblem& problem, double regularization);

}  // namespace nalm

#endif  // NALM_MARGIN_HPP_
