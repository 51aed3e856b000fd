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

#include "nalm/margin.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "nalm/random.hpp"

namespace nalm {
namespace {

// Row-major copy of the column-major bins so one example is contiguous.
std::vector<std::uint8_t> rows_of(const BinnedMatrix& m) {
  std::vector<std::uint8_t> out(m.rows * m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    const auto col = m.column(c);
    for (std::size_t r = 0; r < m.rows; ++r) out[r * m.cols + c] = col[r];
  }
  return out;
}

}  // namespace

double MarginClassifier::decision(std::span<const double> standardized,
                                  std::span<const std::uint8_t> bins) const {
  double score = bias;
  for (std::size_t f = 0; f < dense_weights.size(); ++f) {
    score += dense_weights[f] * standardized[f];
  }
  for (std::size_t f = 0; f < bin_offsets.size(); ++f) {
    score += bin_weights[bin_offsets[f] + bins[f]];
  }
  return score;
}

double margin_objective(const MarginClassifier& classifier,
                        const MarginProblem& problem, double regularization) {
  const auto& x = *problem.standardized;
  const auto& labels = *problem.labels;
  std::vector<std::uint8_t> row(problem.binned->cols);
  double loss = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = problem.binned->at(i, f);
    const double y = labels[i] ? 1.0 : -1.0;
    const double c = problem.class_weight[labels[i] ? 1 : 0];
    loss += c * std::max(0.0, 1.0 - y * classifier.decision(x.row(i), row));
    total_weight += c;
  }
  double norm = 0.0;
  for (double w : classifier.dense_weights) norm += w * w;
  for (double w : classifier.bin_weights) norm += w * w;
  return 0.5 * regularization * norm + (total_weight > 0.0 ? loss / total_weight : 0.0);
}

MarginFit train_margin(const MarginProblem& problem, const MarginParams& params,
                       std::uint64_t rng_seed) {
  const auto& x = *problem.standardized;
  const auto& labels = *problem.labels;
  const std::size_t d = x.cols;
  if (problem.binned->cols != d || problem.binned->rows != x.rows ||
      labels.size() != x.rows || problem.bin_counts.size() != d) {
    throw std::invalid_argument("margin problem: inconsistent shapes");
  }

  MarginFit fit;
  auto& model = fit.classifier;
  model.dense_weights.assign(d, 0.0);
  model.bin_offsets.resize(d);
  std::uint32_t offset = 0;
  for (std::size_t f = 0; f < d; ++f) {
    model.bin_offsets[f] = offset;
    offset += static_cast<std::uint32_t>(problem.bin_counts[f]);
  }
  model.bin_weights.assign(offset, 0.0);

  const auto bins = rows_of(*problem.binned);
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(rng_seed);

  // w = scale * v keeps the per-step shrinkage O(1).
  std::vector<double> dense(d, 0.0);
  std::vector<double> sparse(offset, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  const double lambda = params.regularization;

  auto materialize = [&] {
    for (std::size_t f = 0; f < d; ++f) model.dense_weights[f] = scale * dense[f];
    for (std::size_t k = 0; k < offset; ++k) model.bin_weights[k] = scale * sparse[k];
    model.bias = bias;
  };

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    const double eta = params.learning_rate / (1.0 + epoch);
    for (std::size_t i : order) {
      const auto xi = x.row(i);
      const std::uint8_t* bi = bins.data() + i * d;
      double score = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        score += dense[f] * xi[f] + sparse[model.bin_offsets[f] + bi[f]];
      }
      score = scale * score + bias;

      scale *= 1.0 - eta * lambda;
      const double y = labels[i] ? 1.0 : -1.0;
      if (y * score < 1.0) {
        const double g = eta * problem.class_weight[labels[i] ? 1 : 0] * y;
        const double gs = g / scale;
        for (std::size_t f = 0; f < d; ++f) {
          dense[f] += gs * xi[f];
          sparse[model.bin_offsets[f] + bi[f]] += gs;
        }
        bias += g;
      }
      if (scale < 1e-9) {
        for (auto& v : dense) v *= scale;
        for (auto& v : sparse) v *= scale;
        scale = 1.0;
      }
    }
    materialize();
    fit.epoch_objective.push_back(margin_objective(model, problem, lambda));
  }
  materialize();
  return fit;
}

}  // namespace nalm
