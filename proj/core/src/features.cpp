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

#include "nalm/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace nalm {
namespace {

void check_window(int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument(
        fmt::format("window width must be odd and >= 1, got {}", window));
  }
}

}  // namespace

std::vector<double> FeatureVector::flatten() const {
  std::vector<double> out;
  out.reserve(window.size() + deltas.size() + 2);
  out.insert(out.end(), window.begin(), window.end());
  out.insert(out.end(), deltas.begin(), deltas.end());
  out.push_back(tod_sin);
  out.push_back(tod_cos);
  return out;
}

FeatureVector extract_features(const PowerTrace& trace, std::size_t t,
                               int window) {
  check_window(window);
  if (t >= trace.size()) {
    throw std::out_of_range(
        fmt::format("t={} outside trace of {} samples", t, trace.size()));
  }
  const auto n = static_cast<std::ptrdiff_t>(trace.size());
  const int half = window / 2;
  FeatureVector fv;
  fv.window.reserve(static_cast<std::size_t>(window));
  for (int k = -half; k <= half; ++k) {
    const auto idx = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(t) + k, 0, n - 1);
    fv.window.push_back(trace[static_cast<std::size_t>(idx)]);
  }
  fv.deltas.reserve(fv.window.size() - 1);
  for (std::size_t i = 0; i + 1 < fv.window.size(); ++i) {
    fv.deltas.push_back(fv.window[i + 1] - fv.window[i]);
  }
  // Phase within the day; the trace itself may be shorter than a day.
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) /
                       static_cast<double>(kSecondsPerDay);
  fv.tod_sin = std::sin(phase);
  fv.tod_cos = std::cos(phase);
  return fv;
}

FeatureMatrix build_feature_matrix(const PowerTrace& trace, int window) {
  check_window(window);
  FeatureMatrix m;
  m.rows = trace.size();
  m.cols = feature_dimension(window);
  m.values.resize(m.rows * m.cols);
  for (std::size_t t = 0; t < m.rows; ++t) {
    const auto flat = extract_features(trace, t, window).flatten();
    std::copy(flat.begin(), flat.end(), m.values.begin() + static_cast<std::ptrdiff_t>(t * m.cols));
  }
  return m;
}

QuantileBinner::QuantileBinner(std::vector<std::vector<double>> edges)
    : edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.size() > 254 || !std::is_sorted(e.begin(), e.end()) ||
        std::adjacent_find(e.begin(), e.end()) != e.end()) {
      throw std::invalid_argument("bin edges must be strictly ascending (<= 254)");
    }
  }
}

QuantileBinner QuantileBinner::fit(const FeatureMatrix& features) {
  std::vector<std::vector<double>> edges(features.cols);
  std::vector<double> column;
  for (std::size_t c = 0; c < features.cols; ++c) {
    column.resize(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r) column[r] = features.at(r, c);
    std::sort(column.begin(), column.end());
    column.erase(std::unique(column.begin(), column.end()), column.end());
    auto& out = edges[c];
    if (column.size() <= kQuantileEdges + kUniformEdges) {
      // Few distinct values: every value is its own cut point.
      out.assign(column.begin(), column.end());
    } else {
      const double lo = column.front();
      const double hi = column.back();
      for (std::size_t q = 1; q <= kQuantileEdges; ++q) {
        const auto idx = q * (column.size() - 1) / (kQuantileEdges + 1);
        out.push_back(column[idx]);
      }
      for (std::size_t u = 1; u <= kUniformEdges; ++u) {
        out.push_back(lo + (hi - lo) * static_cast<double>(u) /
                               static_cast<double>(kUniformEdges + 1));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    // The topmost edge never separates anything from above.
    if (!out.empty() && out.back() >= column.back()) out.pop_back();
  }
  return QuantileBinner(std::move(edges));
}

std::uint8_t QuantileBinner::bin(std::size_t dim, double value) const {
  const auto& e = edges_[dim];
  return static_cast<std::uint8_t>(std::lower_bound(e.begin(), e.end(), value) -
                                   e.begin());
}

BinnedMatrix QuantileBinner::transform(const FeatureMatrix& features) const {
  if (features.cols != edges_.size()) {
    throw std::invalid_argument("feature width does not match binner");
  }
  BinnedMatrix out{features.rows, features.cols,
                   std::vector<std::uint8_t>(features.rows * features.cols)};
  for (std::size_t c = 0; c < features.cols; ++c) {
    for (std::size_t r = 0; r < features.rows; ++r) {
      out.bins[c * features.rows + r] = bin(c, features.at(r, c));
    }
  }
  return out;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw std::invalid_argument("mean/scale dimension mismatch");
  }
  for (double s : scale_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("standardizer scale must be finite and > 0");
    }
  }
}

Standardizer Standardizer::fit(const FeatureMatrix& features) {
  std::vector<double> mean(features.cols, 0.0);
  std::vector<double> scale(features.cols, 1.0);
  if (features.rows == 0) return Standardizer(std::move(mean), std::move(scale));
  const auto n = static_cast<double>(features.rows);
  for (std::size_t c = 0; c < features.cols; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < features.rows; ++r) sum += features.at(r, c);
    const double mu = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < features.rows; ++r) {
      const double d = features.at(r, c) - mu;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    mean[c] = mu;
    scale[c] = sd > 1e-12 * std::max(1.0, std::abs(mu)) ? sd : 1.0;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& features) const {
  if (features.cols != mean_.size()) {
    throw std::invalid_argument("feature width does not match standardizer");
  }
  FeatureMatrix out = features;
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) {
      auto& v = out.values[r * out.cols + c];
      v = apply(c, v);
    }
  }
  return out;
}

}  // namespace nalm
