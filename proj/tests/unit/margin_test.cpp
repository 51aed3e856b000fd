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

#include <algorithm>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "nalm/features.hpp"
#include "nalm/margin.hpp"
#include "nalm/pipeline.hpp"
#include "nalm/synthetic.hpp"
#include "testing.hpp"

namespace nalm {
namespace {

struct Prepared {
  FeatureMatrix standardized;
  BinnedMatrix binned;
  std::vector<std::size_t> bin_counts;
  std::vector<bool> labels;

  MarginProblem problem() const {
    MarginProblem p;
    p.standardized = &standardized;
    p.binned = &binned;
    p.bin_counts = bin_counts;
    p.labels = &labels;
    return p;
  }
};

Prepared prepare(const PowerTrace& aggregate, const StateRow& labels, int window) {
  const auto features = build_feature_matrix(aggregate, window);
  const auto binner = QuantileBinner::fit(features);
  Prepared p;
  p.standardized = Standardizer::fit(features).transform(features);
  p.binned = binner.transform(features);
  for (std::size_t f = 0; f < binner.dimension(); ++f) p.bin_counts.push_back(binner.bin_count(f));
  p.labels = labels;
  return p;
}

Prepared separable_row(const std::string& appliance) {
  const auto scenario = separable_scenario();
  const auto day = generate_day(scenario, scenario.train_day, 5);
  const auto s = synthesize(day.traces, {});
  return prepare(s.aggregate, s.labels.find(appliance)->states, 9);
}

// Inverse class frequency, as training uses by default.
void weight_classes(MarginProblem& p) {
  const auto& labels = *p.labels;
  const double n = static_cast<double>(labels.size());
  const double on = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  p.class_weight[0] = n / (2.0 * (n - on));
  p.class_weight[1] = n / (2.0 * on);
}

std::vector<std::uint8_t> row_bins(const BinnedMatrix& m, std::size_t r) {
  std::vector<std::uint8_t> out(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) out[c] = m.at(r, c);
  return out;
}

TEST(MarginTest, ObjectiveDecreasesAcrossEpochs) {
  for (const char* appliance : {"Kettle", "Lamp"}) {
    const Prepared data = separable_row(appliance);
    MarginProblem problem = data.problem();
    weight_classes(problem);
    const MarginParams params;
    const auto fit = train_margin(problem, params, 3);
    ASSERT_EQ(fit.epoch_objective.size(), static_cast<std::size_t>(params.epochs));

    // The all-zero starting model scores exactly 1: every hinge is active.
    MarginClassifier zero = fit.classifier;
    std::fill(zero.dense_weights.begin(), zero.dense_weights.end(), 0.0);
    std::fill(zero.bin_weights.begin(), zero.bin_weights.end(), 0.0);
    zero.bias = 0.0;
    double previous = margin_objective(zero, problem, params.regularization);
    EXPECT_DOUBLE_EQ(previous, 1.0);

    for (std::size_t e = 0; e < fit.epoch_objective.size(); ++e) {
      EXPECT_LT(fit.epoch_objective[e], previous) << appliance << " epoch " << e;
      previous = fit.epoch_objective[e];
    }
    EXPECT_DOUBLE_EQ(fit.epoch_objective.back(),
                     margin_objective(fit.classifier, problem, params.regularization));
  }
}

TEST(MarginTest, SeparatesTheTrainingSet) {
  const Prepared data = separable_row("Kettle");
  const auto fit = train_margin(data.problem(), {}, 4);
  for (std::size_t r = 0; r < data.labels.size(); ++r) {
    ASSERT_EQ(fit.classifier.predict(data.standardized.row(r), row_bins(data.binned, r)),
              data.labels[r])
        << "second " << r;
  }
}

TEST(MarginTest, DeterministicPerSeed) {
  std::mt19937_64 rng(51);
  const auto watts = testing::random_watts(rng, 2000, 100.0);
  StateRow labels(watts.size());
  for (std::size_t i = 0; i < watts.size(); ++i) labels[i] = watts[i] > 50.0;
  const Prepared data = prepare(testing::trace_of(watts), labels, 3);
  const MarginParams params{3, 0.05, 1e-3};
  const auto a = train_margin(data.problem(), params, 8);
  EXPECT_EQ(a.classifier, train_margin(data.problem(), params, 8).classifier);
  EXPECT_EQ(a.epoch_objective, train_margin(data.problem(), params, 8).epoch_objective);
  EXPECT_NE(a.classifier, train_margin(data.problem(), params, 9).classifier);
}

TEST(MarginTest, DecisionIsBiasPlusDenseDotPlusBinWeights) {
  MarginClassifier c;
  c.dense_weights = {2.0, -1.0};
  c.bin_offsets = {0, 3};
  c.bin_weights = {0.1, 0.2, 0.3, 1.0, 2.0};
  c.bias = 0.5;
  const std::vector<double> x{1.0, 4.0};
  const std::vector<std::uint8_t> bins{2, 1};
  EXPECT_DOUBLE_EQ(c.decision(x, bins), 0.5 + 2.0 - 4.0 + 0.3 + 2.0);
  EXPECT_TRUE(c.predict(x, bins));
}

TEST(MarginTest, RejectsInconsistentShapes) {
  Prepared data = prepare(testing::trace_of({1, 2, 3, 4}), {false, false, true, true}, 1);
  data.labels.pop_back();
  EXPECT_THROW(train_margin(data.problem(), {}, 1), std::invalid_argument);
}

}  // namespace
}  // namespace nalm
