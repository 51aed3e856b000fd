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

#ifndef NALM_PIPELINE_HPP_
#define NALM_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/behavior.hpp"
#include "nalm/disaggregation.hpp"
#include "nalm/evaluation.hpp"
#include "nalm/ingest.hpp"
#include "nalm/report.hpp"
#include "nalm/trace.hpp"
#include "nalm/usage.hpp"

namespace nalm {

/// An appliance trace file named on the command line or in a config.
struct InputFile {
  ApplianceId appliance;
  std::string path;
};

/// `NAME:TYPE=PATH`, `NAME=PATH` (type = name) or `PATH` (name and type =
/// file stem). Throws ConfigError on an empty component.
InputFile parse_input_spec(std::string_view spec);

/// Every knob of the end-to-end run. Loaded from JSON:
///
///   {
///     "seed": 42,
///     "train":  {"backend": "forest", "window": 9, "n_trees": 100,
///                "max_depth": 12, "min_leaf": 5, "epochs": 20,
///                "learning_rate": 0.01, "regularization": 1e-4,
///                "class_weighting": true},
///     "labels": {"on_threshold": 5, "min_on": 30,
///                "types": {"lamp": {"on_threshold": 3, "min_on": 10}}},
///     "usage":  {"min_gap": 60, "min_len": 120},
///     "ingest": {"gap_fill": 10},
///     "report": {"user": "Alice", "home": "home",
///                "template": "default" | {...} | {"file": "t.json"}},
///     "pipeline": {"train_day": "2024-01-01", "test_day": "2024-01-02",
///                  "inputs": [{"name": "Kettle", "type": "kettle",
///                              "path": "kettle.csv"}],
///                  "service_url": "http://127.0.0.1:8080",
///                  "service_home": "home"}
///   }
///
/// Every section and key is optional; unknown keys are rejected.
struct PipelineConfig {
  TrainConfig train;
  LabelConfig labels;
  UsageConfig usage;
  int gap_fill = kDefaultGapFill;
  std::string user = "User";
  std::string home = std::string(kDefaultHomeId);
  ReportTemplate report_template;
  std::vector<InputFile> inputs;
  std::optional<Day> train_day;
  std::optional<Day> test_day;
  std::optional<std::string> service_url;
  /// Home id queried on the service; defaults to `home`.
  std::optional<std::string> service_home;

  /// Checks the stage parameters. With `full_run`, also that the pipeline
  /// section names both days and at least one input. Throws ConfigError.
  void validate(bool full_run = false) const;
};

/// Relative paths in the document are resolved against `base_dir`.
/// Throws ConfigError.
PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::string& path);

std::vector<ApplianceFile> load_inputs(const std::vector<InputFile>& inputs);

struct Synthesized {
  PowerTrace aggregate;
  StateMask labels;
};

/// Virtual smart-meter signal plus threshold ground truth for one day.
Synthesized synthesize(const TraceSet& traces, const LabelConfig& labels);

struct ReportArtifacts {
  std::vector<UsageInterval> usages;
  BehaviorModel behavior;
  std::string text;
};

/// Usage extraction, object model and rendered text for a predicted mask.
ReportArtifacts make_report(const StateMask& mask, const std::string& user,
                            const std::string& home, const ReportTemplate& tpl,
                            const UsageConfig& usage);

/// Aggregate trace for `day` from the storage service, resampled like a
/// trace file and zero-padded (flagged partial) when it does not cover the
/// whole day. Throws Error when the service has no data for the day.
PowerTrace fetch_aggregate(const std::string& service_url, const std::string& home,
                           Day day, int gap_fill);

/// File names written by run_pipeline() into the output directory. The
/// individual CLI commands produce the same files.
namespace artifacts {
inline constexpr std::string_view kTrainTraces = "train_traces.csv";
inline constexpr std::string_view kTrainAggregate = "train_aggregate.csv";
inline constexpr std::string_view kTrainLabels = "train_labels.csv";
inline constexpr std::string_view kModel = "model.nalm";
inline constexpr std::string_view kTestTraces = "test_traces.csv";
inline constexpr std::string_view kTestAggregate = "test_aggregate.csv";
inline constexpr std::string_view kTestLabels = "test_labels.csv";
inline constexpr std::string_view kPredicted = "predicted.csv";
inline constexpr std::string_view kMetricsText = "metrics.txt";
inline constexpr std::string_view kMetricsJson = "metrics.json";
inline constexpr std::string_view kUsages = "usages.csv";
inline constexpr std::string_view kBehavior = "behavior.xml";
inline constexpr std::string_view kReport = "report.txt";
}  // namespace artifacts

struct PipelineResult {
  std::string report;
  /// Absent when no ground truth was available for the test day.
  std::optional<ConfusionTable> metrics;
};

/// ingest -> synthesize -> train -> predict -> evaluate -> report, writing
/// every intermediate artifact into `out_dir`. When a service URL is
/// configured the test-day aggregate comes from the storage service and
/// evaluation runs only if the input files also cover the test day.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::filesystem::path& out_dir,
                            TrainOptions options = {});

}  // namespace nalm

#endif  // NALM_PIPELINE_HPP_
