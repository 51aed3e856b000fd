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

#ifndef NALM_FEATURES_HPP_
#define NALM_FEATURES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nalm/trace.hpp"

namespace nalm {

/// Classifier input for one second of an aggregate trace.
struct FeatureVector {
  /// `w` raw watt values centred on t; out-of-range indices repeat the
  /// boundary sample.
  std::vector<double> window;
  /// window[i + 1] - window[i], w - 1 values.
  std::vector<double> deltas;
  /// sin and cos of 2*pi*t/86400.
  double tod_sin = 0.0;
  double tod_cos = 0.0;

  /// window, deltas, sin, cos: 2w + 1 values.
  std::vector<double> flatten() const;
};

/// Feature dimensionality for a window width.
constexpr std::size_t feature_dimension(int window) {
  return static_cast<std::size_t>(2 * window + 1);
}

/// Throws std::invalid_argument unless window is odd and >= 1, and
/// std::out_of_range unless t < trace.size().
FeatureVector extract_features(const PowerTrace& trace, std::size_t t,
                               int window);

/// Dense row-major feature table, one row per second of a trace.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Row t equals extract_features(trace, t, window).flatten().
FeatureMatrix build_feature_matrix(const PowerTrace& trace, int window);

/// Column-major table of bin indices.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bins;

  std::span<const std::uint8_t> column(std::size_t c) const {
    return {bins.data() + c * rows, rows};
  }
  std::uint8_t at(std::size_t r, std::size_t c) const { return bins[c * rows + r]; }
};

/// Per-dimension split candidates. Each dimension keeps an ascending list
/// of at most 64 edges (the union of up to 32 quantile cut points and 32
/// equal-width cut points of the training values). The bin of x is the
/// number of edges strictly below x, so `bin(x) <= b` iff `x <= edges[b]`.
class QuantileBinner {
 public:
  static constexpr std::size_t kQuantileEdges = 32;
  static constexpr std::size_t kUniformEdges = 32;

  QuantileBinner() = default;
  explicit QuantileBinner(std::vector<std::vector<double>> edges);

  static QuantileBinner fit(const FeatureMatrix& features);

  std::size_t dimension() const { return edges_.size(); }
  const std::vector<double>& edges(std::size_t dim) const { return edges_[dim]; }
  const std::vector<std::vector<double>>& all_edges() const { return edges_; }
  /// Number of distinct bins of a dimension (edges + 1).
  std::size_t bin_count(std::size_t dim) const { return edges_[dim].size() + 1; }

  std::uint8_t bin(std::size_t dim, double value) const;
  BinnedMatrix transform(const FeatureMatrix& features) const;

  friend bool operator==(const QuantileBinner&, const QuantileBinner&) = default;

 private:
  std::vector<std::vector<double>> edges_;
};

/// Per-dimension affine scaling to zero mean and unit variance, measured on
/// the training features. Dimensions with (near) zero variance keep scale 1.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> scale);

  static Standardizer fit(const FeatureMatrix& features);

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }
  std::size_t dimension() const { return mean_.size(); }

  double apply(std::size_t dim, double value) const {
    return (value - mean_[dim]) / scale_[dim];
  }
  FeatureMatrix transform(const FeatureMatrix& features) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace nalm

#endif  // NALM_FEATURES_HPP_
