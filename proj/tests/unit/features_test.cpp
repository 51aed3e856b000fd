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

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "nalm/features.hpp"
#include "testing.hpp"

namespace nalm {
namespace {

using testing::trace_of;

TEST(ExtractFeaturesTest, ConstantTrace) {
  const auto f = extract_features(trace_of(std::vector<double>(10, 50.0)), 4, 3);
  EXPECT_EQ(f.window, (std::vector<double>{50, 50, 50}));
  EXPECT_EQ(f.deltas, (std::vector<double>{0, 0}));
}

TEST(ExtractFeaturesTest, EdgesRepeatTheBoundarySample) {
  const auto trace = trace_of({1, 2, 3, 4, 5});
  EXPECT_EQ(extract_features(trace, 0, 3).window, (std::vector<double>{1, 1, 2}));
  EXPECT_EQ(extract_features(trace, 4, 5).window, (std::vector<double>{3, 4, 5, 5, 5}));
  EXPECT_EQ(extract_features(trace, 2, 1).window, (std::vector<double>{3}));
  EXPECT_TRUE(extract_features(trace, 2, 1).deltas.empty());
}

TEST(ExtractFeaturesTest, TimeOfDayEncoding) {
  const auto trace = trace_of(std::vector<double>(86400, 1.0));
  const auto f = extract_features(trace, 21600, 3);
  EXPECT_NEAR(f.tod_sin, 1.0, 1e-12);
  EXPECT_NEAR(f.tod_cos, 0.0, 1e-12);
  const auto g = extract_features(trace, 0, 3);
  EXPECT_NEAR(g.tod_sin, 0.0, 1e-12);
  EXPECT_NEAR(g.tod_cos, 1.0, 1e-12);
}

TEST(ExtractFeaturesTest, DeltasAreFirstDifferences) {
  std::mt19937_64 rng(31);
  const auto samples = testing::random_watts(rng, 2000, 1000.0);
  const auto trace = trace_of(samples);
  for (int w : {1, 3, 9, 15}) {
    for (std::size_t t = 0; t < samples.size(); t += 37) {
      const auto f = extract_features(trace, t, w);
      ASSERT_EQ(f.window.size(), static_cast<std::size_t>(w));
      ASSERT_EQ(f.deltas.size(), static_cast<std::size_t>(w - 1));
      for (std::size_t i = 0; i + 1 < f.window.size(); ++i) {
        EXPECT_EQ(f.deltas[i], f.window[i + 1] - f.window[i]);
      }
      EXPECT_EQ(f.window[static_cast<std::size_t>(w / 2)], samples[t]);
      const auto flat = f.flatten();
      ASSERT_EQ(flat.size(), feature_dimension(w));
      EXPECT_EQ(flat.back(), f.tod_cos);
      EXPECT_EQ(flat[flat.size() - 2], f.tod_sin);
    }
  }
}

TEST(ExtractFeaturesTest, RejectsBadArguments) {
  const auto trace = trace_of({1, 2, 3});
  EXPECT_THROW(extract_features(trace, 0, 2), std::invalid_argument);
  EXPECT_THROW(extract_features(trace, 0, 0), std::invalid_argument);
  EXPECT_THROW(extract_features(trace, 0, -3), std::invalid_argument);
  EXPECT_THROW(extract_features(trace, 3, 3), std::out_of_range);
}

TEST(FeatureMatrixTest, RowsMatchExtractFeatures) {
  std::mt19937_64 rng(32);
  const auto trace = trace_of(testing::random_watts(rng, 300, 100.0));
  const auto m = build_feature_matrix(trace, 5);
  ASSERT_EQ(m.rows, 300u);
  ASSERT_EQ(m.cols, feature_dimension(5));
  for (std::size_t t = 0; t < m.rows; ++t) {
    const auto expected = extract_features(trace, t, 5).flatten();
    const auto row = m.row(t);
    EXPECT_TRUE(std::equal(row.begin(), row.end(), expected.begin())) << t;
  }
}

TEST(QuantileBinnerTest, FewDistinctValuesKeepEveryCut) {
  FeatureMatrix m{6, 1, {0, 100, 1000, 100, 0, 1100}};
  const auto binner = QuantileBinner::fit(m);
  EXPECT_EQ(binner.edges(0), (std::vector<double>{0, 100, 1000}));
  EXPECT_EQ(binner.bin(0, 0), 0);
  EXPECT_EQ(binner.bin(0, 50), 1);
  EXPECT_EQ(binner.bin(0, 100), 1);
  EXPECT_EQ(binner.bin(0, 1100), 3);
  EXPECT_EQ(binner.bin_count(0), 4u);
}

TEST(QuantileBinnerTest, EveryColumnIsBinnedIndependently) {
  // Regression: later columns must see all rows, not a shrunken buffer.
  FeatureMatrix m{4, 3, {0, 5, 1, 0, 6, 2, 1, 7, 3, 1, 8, 4}};
  const auto binner = QuantileBinner::fit(m);
  EXPECT_EQ(binner.edges(0), (std::vector<double>{0}));
  EXPECT_EQ(binner.edges(1), (std::vector<double>{5, 6, 7}));
  EXPECT_EQ(binner.edges(2), (std::vector<double>{1, 2, 3}));
}

TEST(QuantileBinnerTest, ManyValuesAreCappedAndOrdered) {
  std::mt19937_64 rng(33);
  const auto values = testing::random_watts(rng, 5000, 3000.0);
  FeatureMatrix m{values.size(), 1, values};
  const auto binner = QuantileBinner::fit(m);
  const auto& edges = binner.edges(0);
  EXPECT_LE(edges.size(), 64u);
  EXPECT_GE(edges.size(), 32u);
  EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
  EXPECT_EQ(std::set<double>(edges.begin(), edges.end()).size(), edges.size());
  // bin(x) <= b exactly when x <= edges[b].
  for (double x : values) {
    const auto b = binner.bin(0, x);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      EXPECT_EQ(b <= e, x <= edges[e]);
    }
  }
}

TEST(QuantileBinnerTest, TransformIsColumnMajor) {
  FeatureMatrix m{3, 2, {0, 10, 1, 20, 2, 30}};
  const auto binner = QuantileBinner::fit(m);
  const auto binned = binner.transform(m);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_EQ(binned.at(r, c), binner.bin(c, m.at(r, c)));
      EXPECT_EQ(binned.column(c)[r], binned.at(r, c));
    }
  }
  EXPECT_THROW(binner.transform(FeatureMatrix{1, 3, {0, 0, 0}}), std::invalid_argument);
}

TEST(QuantileBinnerTest, RejectsUnsortedEdges) {
  EXPECT_THROW(QuantileBinner({{2.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(QuantileBinner({{1.0, 1.0}}), std::invalid_argument);
}

TEST(StandardizerTest, TrainingFeaturesAreStandardized) {
  std::mt19937_64 rng(34);
  std::vector<double> samples = testing::random_watts(rng, 86400, 1500.0);
  const auto m = build_feature_matrix(PowerTrace(testing::default_day(), samples, "x"), 9);
  const auto standardizer = Standardizer::fit(m);
  const auto z = standardizer.transform(m);
  for (std::size_t c = 0; c < z.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < z.rows; ++r) mean += z.at(r, c);
    mean /= static_cast<double>(z.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < z.rows; ++r) var += (z.at(r, c) - mean) * (z.at(r, c) - mean);
    var /= static_cast<double>(z.rows);
    EXPECT_LT(std::abs(mean), 1e-9) << c;
    EXPECT_NEAR(var, 1.0, 1e-6) << c;
  }
}

TEST(StandardizerTest, ConstantDimensionsKeepUnitScale) {
  FeatureMatrix m{3, 2, {5, 1, 5, 2, 5, 3}};
  const auto s = Standardizer::fit(m);
  EXPECT_EQ(s.scale()[0], 1.0);
  EXPECT_EQ(s.mean()[0], 5.0);
  EXPECT_EQ(s.apply(0, 5.0), 0.0);
  EXPECT_THROW(Standardizer({0.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(Standardizer({0.0}, {1.0, 2.0}), std::invalid_argument);
}

}  // namespace
}  // namespace nalm
