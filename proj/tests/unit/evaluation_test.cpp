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

#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nalm/error.hpp"
#include "nalm/evaluation.hpp"
#include "testing.hpp"

namespace nalm {
namespace {

using testing::default_day;

StateMask mask_of(std::vector<std::pair<std::string, StateRow>> rows) {
  StateMask mask(default_day(), rows.front().second.size());
  for (auto& [name, row] : rows) mask.insert({name, name}, std::move(row));
  return mask;
}

TEST(MetricsTest, SmallExample) {
  const auto m = metrics({3, 1, 5, 1});
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(m.tpr, 0.75);
  EXPECT_DOUBLE_EQ(m.tnr, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.f1, 0.75);
  EXPECT_FALSE(m.degenerate);
}

TEST(MetricsTest, ZeroDenominatorsAreFlagged) {
  const auto m = metrics({0, 0, 10, 0});
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.tpr, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.tnr, 1.0);
  EXPECT_TRUE(m.degenerate);
  EXPECT_THROW(metrics({}), std::invalid_argument);
}

TEST(MetricsTest, ReferenceRowsReproduce) {
  for (const auto& r : testing::kReferenceRows) {
    const auto m = metrics({r.tp, r.fp, r.tn, r.fn});
    EXPECT_NEAR(m.precision, r.precision, 0.001) << r.name;
    EXPECT_NEAR(m.accuracy, r.accuracy, 0.001) << r.name;
    EXPECT_NEAR(m.tpr, r.tpr, 0.001) << r.name;
    EXPECT_NEAR(m.tnr, r.tnr, 0.001) << r.name;
    EXPECT_NEAR(m.f1, r.f1, 0.001) << r.name;
  }
}

TEST(MetricsTest, ScalingCountsKeepsMetrics) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<std::uint64_t> count(1, 100000);
  for (int i = 0; i < 200; ++i) {
    const ConfusionCounts c{count(rng), count(rng), count(rng), count(rng)};
    const ConfusionCounts scaled{c.tp * 7, c.fp * 7, c.tn * 7, c.fn * 7};
    const auto a = metrics(c);
    const auto b = metrics(scaled);
    EXPECT_DOUBLE_EQ(a.precision, b.precision);
    EXPECT_DOUBLE_EQ(a.accuracy, b.accuracy);
    EXPECT_DOUBLE_EQ(a.tpr, b.tpr);
    EXPECT_DOUBLE_EQ(a.tnr, b.tnr);
    EXPECT_DOUBLE_EQ(a.f1, b.f1);
    for (double v : {a.precision, a.accuracy, a.tpr, a.tnr, a.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ConfusionTest, MatchesCountingOracle) {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 20; ++i) {
    const auto p1 = testing::random_row(rng, 5000, 0.3);
    const auto p2 = testing::random_row(rng, 5000, 0.6);
    const auto t1 = testing::random_runs(rng, 5000, 100);
    const auto t2 = testing::random_runs(rng, 5000, 100);
    const auto table = confusion(mask_of({{"a", p1}, {"b", p2}}), mask_of({{"b", t2}, {"a", t1}}));
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].counts, testing::oracle::count(p1, t1));
    EXPECT_EQ(table.rows[1].counts, testing::oracle::count(p2, t2));
    ConfusionCounts sum = testing::oracle::count(p1, t1);
    sum += testing::oracle::count(p2, t2);
    EXPECT_EQ(table.overall, sum);
    for (const auto& row : table.rows) EXPECT_EQ(row.counts.total(), 5000u);
  }
}

TEST(ConfusionTest, PerfectPrediction) {
  std::mt19937_64 rng(73);
  const auto row = testing::random_runs(rng, 1000, 50);
  const auto table = confusion(mask_of({{"a", row}}), mask_of({{"a", row}}));
  EXPECT_EQ(table.rows[0].counts.fp + table.rows[0].counts.fn, 0u);
  EXPECT_EQ(metrics(table.overall).accuracy, 1.0);
}

TEST(ConfusionTest, StructuralMismatches) {
  const StateRow r(10, false);
  EXPECT_THROW(confusion(mask_of({{"a", r}}), mask_of({{"a", StateRow(11, false)}})),
               StructuralError);
  EXPECT_THROW(confusion(mask_of({{"a", r}}), mask_of({{"b", r}})), StructuralError);
  EXPECT_THROW(confusion(mask_of({{"a", r}, {"b", r}}), mask_of({{"a", r}})), StructuralError);
}

TEST(ConfusionTableTest, UnequalTotalsAreRejected) {
  ConfusionTable table;
  table.rows = {{"a", {1, 1, 1, 1}}, {"b", {1, 1, 1, 2}}};
  EXPECT_THROW(table.check_equal_totals(), StructuralError);
}

TEST(ParseCountsTableTest, ReferenceTable) {
  const auto table = parse_counts_table(testing::reference_counts_csv());
  ASSERT_EQ(table.rows.size(), testing::kReferenceRows.size() - 1);
  const auto& overall = testing::kReferenceRows.back();
  EXPECT_EQ(table.overall, (ConfusionCounts{overall.tp, overall.fp, overall.tn, overall.fn}));
  EXPECT_EQ(table.rows[0].appliance, testing::kReferenceRows[0].name);
}

TEST(ParseCountsTableTest, OverallDefaultsToSum) {
  const auto table = parse_counts_table("a,1,2,3,4\r\n# note\n\nb, 4,3,2,1\n");
  EXPECT_EQ(table.overall, (ConfusionCounts{5, 5, 5, 5}));
}

TEST(ParseCountsTableTest, Errors) {
  EXPECT_THROW(parse_counts_table(""), ParseError);
  EXPECT_THROW(parse_counts_table("name,tp,fp,tn,fn\n"), ParseError);
  EXPECT_THROW(parse_counts_table("a,1,2,3\n"), ParseError);
  EXPECT_THROW(parse_counts_table("a,1,2,x,4\n"), ParseError);
  EXPECT_THROW(parse_counts_table("a,1,2,-3,4\n"), ParseError);
  EXPECT_THROW(parse_counts_table("a,1,1,1,1\nb,1,1,1,2\n"), StructuralError);
}

TEST(FormatMetricsTableTest, ThreeDecimalsAndOverall) {
  const auto text = format_metrics_table(parse_counts_table(testing::reference_counts_csv()));
  EXPECT_NE(text.find("Prec."), std::string::npos);
  EXPECT_NE(text.find("TV-CRT"), std::string::npos);
  EXPECT_NE(text.find(" 0.998  0.976  0.855  1.000  0.921"), std::string::npos) << text;
  EXPECT_NE(text.find("Overall"), std::string::npos);
  EXPECT_NE(text.find(" 0.780  0.943  0.787  0.967  0.783"), std::string::npos) << text;
}

TEST(FormatMetricsTableTest, MarksDegenerateRows) {
  ConfusionTable table;
  table.rows = {{"idle", {0, 0, 10, 0}}};
  table.overall = table.rows[0].counts;
  EXPECT_NE(format_metrics_table(table).find("(degenerate)"), std::string::npos);
}

TEST(MetricsJsonTest, CarriesCountsAndMetrics) {
  const auto table = parse_counts_table(testing::reference_counts_csv());
  const auto j = nlohmann::json::parse(metrics_to_json(table));
  EXPECT_EQ(j["format"], "nalm-metrics");
  ASSERT_EQ(j["appliances"].size(), table.rows.size());
  EXPECT_EQ(j["appliances"][0]["tp"], 12048);
  EXPECT_NEAR(j["overall"]["f1"].get<double>(), 0.783, 0.001);
  EXPECT_FALSE(j["overall"]["degenerate"].get<bool>());
}

}  // namespace
}  // namespace nalm
