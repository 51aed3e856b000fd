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
#include <filesystem>
#include <map>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "nalm/error.hpp"
#include "nalm/formats.hpp"
#include "nalm/pipeline.hpp"
#include "nalm/synthetic.hpp"
#include "testing.hpp"

namespace nalm {
namespace {

namespace fs = std::filesystem;

TEST(SyntheticTest, DeterministicPerSeedAndDay) {
  for (const auto& scenario : {separable_scenario(), overlapping_scenario()}) {
    const auto a = generate_day(scenario, scenario.train_day, 11);
    const auto b = generate_day(scenario, scenario.train_day, 11);
    EXPECT_EQ(write_trace_set(a.traces), write_trace_set(b.traces)) << scenario.name;
    EXPECT_EQ(a.truth, b.truth);
    EXPECT_NE(a.truth, generate_day(scenario, scenario.train_day, 12).truth);
    EXPECT_NE(a.truth, generate_day(scenario, scenario.test_day, 11).truth);
  }
}

TEST(SyntheticTest, ThresholdLabelsReproduceGeneratorTruth) {
  for (const auto& scenario : {separable_scenario(), overlapping_scenario()}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto day = generate_day(scenario, scenario.test_day, seed);
      EXPECT_EQ(label_set(day.traces, {}), day.truth) << scenario.name << " seed " << seed;
      for (const auto& m : day.traces.members()) {
        EXPECT_EQ(m.trace.size(), 86400u);
        EXPECT_FALSE(m.trace.partial());
      }
    }
  }
}

TEST(SyntheticTest, SeparableUsesNeverOverlap) {
  const auto scenario = separable_scenario();
  const auto truth = generate_day(scenario, scenario.train_day, 5).truth;
  const auto& kettle = truth.find("Kettle")->states;
  const auto& lamp = truth.find("Lamp")->states;
  for (std::size_t t = 0; t < kettle.size(); ++t) ASSERT_FALSE(kettle[t] && lamp[t]) << t;
  for (int t = 25200; t < 25500; ++t) EXPECT_TRUE(kettle[static_cast<std::size_t>(t)]);
  EXPECT_THROW(scenario_by_name("chaotic"), ConfigError);
  EXPECT_EQ(scenario_by_name("overlapping").appliances.size(), 6u);
}

TEST(InputSpecTest, Forms) {
  EXPECT_EQ(parse_input_spec("Kettle:kettle=/d/k.csv").appliance, (ApplianceId{"Kettle", "kettle"}));
  const auto named = parse_input_spec("Lamp=lamp.csv");
  EXPECT_EQ(named.appliance, (ApplianceId{"Lamp", "Lamp"}));
  EXPECT_EQ(named.path, "lamp.csv");
  const auto bare = parse_input_spec("/data/TV-LCD.csv");
  EXPECT_EQ(bare.appliance, (ApplianceId{"TV-LCD", "TV-LCD"}));
  for (const char* bad : {"", "=x.csv", "a:=x.csv", "a="}) {
    EXPECT_THROW(parse_input_spec(bad), ConfigError) << bad;
  }
}

TEST(PipelineConfigTest, ParsesEverySection) {
  const auto c = parse_pipeline_config(R"({
    "seed": 9,
    "train": {"backend": "margin", "window": 5, "epochs": 3, "class_weighting": false},
    "labels": {"on_threshold": 7, "types": {"lamp": {"on_threshold": 2, "min_on": 10}}},
    "usage": {"min_gap": 30, "min_len": 90},
    "ingest": {"gap_fill": 4},
    "report": {"user": "Alice", "home": "flat-2", "template": "per-appliance"},
    "pipeline": {"train_day": "2024-01-01", "test_day": "2024-01-02",
                 "inputs": [{"name": "Lamp", "type": "lamp", "path": "lamp.csv"}, "Kettle=/abs/k.csv"],
                 "service_url": "http://localhost:1"}
  })", "/base");
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.train.backend, Backend::kMargin);
  EXPECT_EQ(c.train.window, 5);
  EXPECT_EQ(c.train.margin.epochs, 3);
  EXPECT_FALSE(c.train.class_weighting);
  EXPECT_EQ(c.labels.defaults.on_threshold, 7.0);
  EXPECT_EQ(c.labels.defaults.min_on, 30);
  EXPECT_EQ(c.labels.rule_for("lamp").min_on, 10);
  EXPECT_EQ(c.usage.min_gap, 30);
  EXPECT_EQ(c.usage.min_len, 90);
  EXPECT_EQ(c.gap_fill, 4);
  EXPECT_EQ(c.user, "Alice");
  EXPECT_EQ(c.home, "flat-2");
  EXPECT_EQ(c.report_template.grouping, ReportTemplate::Grouping::kPerAppliance);
  EXPECT_EQ(c.train_day, testing::day(2024, 1, 1));
  ASSERT_EQ(c.inputs.size(), 2u);
  EXPECT_EQ(c.inputs[0].path, "/base/lamp.csv");
  EXPECT_EQ(c.inputs[1].path, "/abs/k.csv");
  EXPECT_EQ(c.service_url, "http://localhost:1");
  EXPECT_NO_THROW(c.validate(true));
}

TEST(PipelineConfigTest, EmptyDocumentKeepsDefaults) {
  const auto c = parse_pipeline_config("{}");
  EXPECT_EQ(c.train, TrainConfig{});
  EXPECT_EQ(c.usage.min_gap, 60);
  EXPECT_EQ(c.usage.min_len, 120);
  EXPECT_THROW(c.validate(true), ConfigError);
}

TEST(PipelineConfigTest, Rejections) {
  for (const char* bad : {
           "[]", "{", R"({"colour": 1})", R"({"train": {"trees": 3}})",
           R"({"train": {"window": "nine"}})", R"({"train": {"window": 4}})",
           R"({"train": {"backend": "svm"}})", R"({"labels": {"on_threshold": 0}})",
           R"({"labels": {"types": {"lamp": {"min_on": 0}}}})", R"({"usage": {"min_gap": -1}})",
           R"({"ingest": {"gap_fill": -2}})", R"({"report": {"user": ""}})",
           R"({"report": {"home": "a/b"}})", R"({"report": {"template": "fancy"}})",
           R"({"report": {"template": {"sentence": "{nope}", "colour": "red"}}})",
           R"({"pipeline": {"train_day": "2024-02-30"}})", R"({"pipeline": {"inputs": {}}})",
           R"({"pipeline": {"inputs": [{"name": "a"}]}})"}) {
    EXPECT_THROW(parse_pipeline_config(bad), ConfigError) << bad;
  }
}

TEST(PipelineConfigTest, TemplateFromFile) {
  testing::TempDir dir;
  write_file(dir.file("t.json"), R"({"sentence": "{appliance} by {user}"})");
  write_file(dir.file("c.json"), R"({"report": {"template": {"file": "t.json"}}})");
  const auto c = load_pipeline_config(dir.file("c.json"));
  EXPECT_EQ(c.report_template.sentence, "{appliance} by {user}");
}

// Per-second epoch,watts files for every appliance of a scenario, both days.
std::vector<InputFile> write_inputs(const Scenario& scenario, std::uint64_t seed,
                                    const fs::path& dir) {
  std::vector<InputFile> inputs;
  std::map<std::string, RawSampleFile> files;
  for (Day day : {scenario.train_day, scenario.test_day}) {
    const auto generated = generate_day(scenario, day, seed);
    for (const auto& m : generated.traces.members()) {
      auto& file = files[m.appliance.name];
      for (std::size_t t = 0; t < m.trace.size(); ++t) {
        file.rows.push_back({day_start_epoch(day) + static_cast<std::int64_t>(t), m.trace[t]});
      }
      if (inputs.size() < scenario.appliances.size() &&
          std::none_of(inputs.begin(), inputs.end(),
                       [&](const auto& in) { return in.appliance == m.appliance; })) {
        inputs.push_back({m.appliance, (dir / (m.appliance.name + ".csv")).string()});
      }
    }
  }
  for (const auto& in : inputs) write_file(in.path, serialize_trace_file(files[in.appliance.name]));
  return inputs;
}

TEST(RunPipelineTest, SeparableEndToEnd) {
  testing::TempDir dir;
  const auto scenario = separable_scenario();
  PipelineConfig config;
  config.inputs = write_inputs(scenario, 3, dir.path());
  config.train_day = scenario.train_day;
  config.test_day = scenario.test_day;
  config.train.forest.n_trees = 25;
  config.user = "Alice";

  const auto result = run_pipeline(config, dir.path() / "run");
  ASSERT_TRUE(result.metrics.has_value());
  EXPECT_EQ(metrics(result.metrics->overall).f1, 1.0);
  EXPECT_EQ(result.report.rfind("Alice was using the Kettle from 07:00 to 07:05.\n", 0), 0u)
      << result.report;
  for (auto name : {artifacts::kTrainTraces, artifacts::kTrainAggregate, artifacts::kTrainLabels,
                    artifacts::kModel, artifacts::kTestTraces, artifacts::kTestAggregate,
                    artifacts::kTestLabels, artifacts::kPredicted, artifacts::kMetricsText,
                    artifacts::kMetricsJson, artifacts::kUsages, artifacts::kBehavior,
                    artifacts::kReport}) {
    EXPECT_TRUE(fs::exists(dir.path() / "run" / name)) << name;
  }
  EXPECT_EQ(read_file((dir.path() / "run" / artifacts::kReport).string()), result.report);
  EXPECT_EQ(read_mask(read_file((dir.path() / "run" / artifacts::kPredicted).string())),
            read_mask(read_file((dir.path() / "run" / artifacts::kTestLabels).string())));
}

TEST(RunPipelineTest, MissingTestDayIsStructural) {
  testing::TempDir dir;
  const auto scenario = separable_scenario();
  PipelineConfig config;
  config.inputs = write_inputs(scenario, 3, dir.path());
  config.train_day = scenario.train_day;
  config.test_day = testing::day(2030, 1, 1);
  config.train.forest.n_trees = 5;
  EXPECT_THROW(run_pipeline(config, dir.path() / "run"), StructuralError);
}

}  // namespace
}  // namespace nalm
