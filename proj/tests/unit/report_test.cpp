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

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "nalm/error.hpp"
#include "nalm/report.hpp"
#include "testing.hpp"

namespace nalm {
namespace {

using testing::default_day;

const std::vector<ApplianceId> kCatalog{{"TV-CRT", "tv"}, {"Lamp", "lamp"}, {"Kettle", "kettle"}};

BehaviorModel model_with(std::vector<std::tuple<std::string, int, int>> usages,
                         std::string user = "Alice") {
  std::vector<UsageInterval> intervals;
  for (auto& [name, start, stop] : usages) {
    intervals.push_back({{name, ""}, default_day(), start, stop});
  }
  return build_model(std::move(user), intervals, kCatalog);
}

std::string hhmm(int seconds) {
  return fmt::format("{:02}:{:02}", seconds / 3600, seconds % 3600 / 60);
}

std::string template_error(const BehaviorModel& model, const ReportTemplate& t) {
  try {
    render_report(model, t);
  } catch (const TemplateError& e) {
    return e.what();
  }
  return "";
}

TEST(RenderReportTest, SingleUsageSentence) {
  const auto model = model_with({{"TV-CRT", 9 * 3600 + 50 * 60, 11 * 3600 + 45 * 60}}, "Rune");
  EXPECT_EQ(render_report(model), "Rune was using the TV-CRT from 09:50 to 11:45.\n");
}

TEST(RenderReportTest, NoUsagesGiveTheEmptySentence) {
  EXPECT_EQ(render_report(model_with({})), "No appliance usage detected.\n");
}

TEST(RenderReportTest, TimesTruncateAndMidnightIs2400) {
  const auto model = model_with({{"Lamp", 3599, 86400}});
  EXPECT_EQ(render_report(model), "Alice was using the Lamp from 00:59 to 24:00.\n");
}

TEST(RenderReportTest, OneLinePerUsageInModelOrder) {
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<int> second(0, 86399);
  for (int round = 0; round < 20; ++round) {
    std::vector<std::tuple<std::string, int, int>> usages;
    for (int i = 0; i < 3; ++i) {
      const int a = second(rng);
      usages.emplace_back(kCatalog[static_cast<std::size_t>(i)].name, a, a + 1 + second(rng) % (86400 - a));
    }
    const auto model = model_with(usages);
    std::string expected;
    for (const auto& u : model.usages) {
      expected += "Alice was using the " + u.appliance + " from " + hhmm(u.start) + " to " +
                  hhmm(u.stop) + ".\n";
    }
    EXPECT_EQ(render_report(model), expected);
  }
}

TEST(RenderReportTest, PerApplianceRanges) {
  const auto model = model_with(
      {{"Lamp", 3600, 7200}, {"Kettle", 4000, 4300}, {"Lamp", 36000, 39600}, {"Lamp", 72000, 75600}});
  EXPECT_EQ(render_report(model, ReportTemplate::builtin("per-appliance")),
            "Alice was using the Lamp from 01:00 to 02:00, from 10:00 to 11:00 and from 20:00 "
            "to 21:00.\n"
            "Alice was using the Kettle from 01:06 to 01:11.\n");
}

TEST(RenderReportTest, DailySummaryHeader) {
  const auto model = model_with({{"Kettle", 25200, 25500}});
  EXPECT_EQ(render_report(model, ReportTemplate::builtin("daily-summary")),
            "Activity of Alice on 2024-01-01:\n- Kettle from 07:00 to 07:05\n");
}

TEST(RenderReportTest, LiteralBracesAndTypeSlot) {
  ReportTemplate t;
  t.sentence = "{{{user}}} used a {type}";
  EXPECT_EQ(render_report(model_with({{"Kettle", 0, 60}}), t), "{Alice} used a kettle\n");
}

TEST(RenderReportTest, TemplateErrorsNameTheSlot) {
  const auto model = model_with({{"Kettle", 0, 60}});
  ReportTemplate t;
  t.sentence = "{user} used {gadget}";
  EXPECT_NE(template_error(model, t).find("gadget"), std::string::npos);
  // A broken template fails even without usages.
  EXPECT_NE(template_error(model_with({}), t).find("gadget"), std::string::npos);

  t = {};
  t.header = "{ranges}";
  EXPECT_NE(template_error(model, t).find("ranges"), std::string::npos);

  t = {};
  t.sentence = "{user";
  EXPECT_NE(template_error(model, t).find("unterminated"), std::string::npos);
  t.sentence = "user}";
  EXPECT_FALSE(template_error(model, t).empty());

  // No day on the model leaves {day} without a value.
  BehaviorModel dayless = model_with({});
  dayless.day.reset();
  t = {};
  t.empty = "nothing on {day}";
  EXPECT_NE(template_error(dayless, t).find("day"), std::string::npos);
}

TEST(ReportTemplateTest, BuiltinsAndJson) {
  EXPECT_THROW(ReportTemplate::builtin("fancy"), TemplateError);
  const auto t = ReportTemplate::from_json(
      R"({"grouping": "per-appliance", "sentence": "{appliance}: {ranges}", "range_last_separator": " & "})");
  EXPECT_EQ(t.grouping, ReportTemplate::Grouping::kPerAppliance);
  EXPECT_EQ(t.range_last_separator, " & ");
  EXPECT_EQ(t.range, ReportTemplate{}.range);
  EXPECT_EQ(render_report(model_with({{"Lamp", 0, 60}, {"Lamp", 120, 180}}), t),
            "Lamp: from 00:00 to 00:01 & from 00:02 to 00:03\n");
  EXPECT_THROW(ReportTemplate::from_json("[1]"), TemplateError);
  EXPECT_THROW(ReportTemplate::from_json("{"), TemplateError);
  EXPECT_THROW(ReportTemplate::from_json(R"({"colour": "red"})"), TemplateError);
  EXPECT_THROW(ReportTemplate::from_json(R"({"grouping": "per-day"})"), TemplateError);
  EXPECT_THROW(ReportTemplate::from_json(R"({"sentence": 3})"), TemplateError);
}

}  // namespace
}  // namespace nalm
