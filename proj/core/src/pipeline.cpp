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

#include "nalm/pipeline.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nalm/error.hpp"
#include "nalm/formats.hpp"
#include "nalm/log.hpp"
#include "nalm/storage.hpp"

namespace nalm {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, std::string_view section,
                    std::initializer_list<std::string_view> known) {
  if (!object.is_object()) {
    throw ConfigError(fmt::format("'{}' must be a JSON object", section));
  }
  for (const auto& [key, _] : object.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(fmt::format("unknown key '{}' in '{}'", key, section));
    }
  }
}

template <typename T>
void read_key(const json& object, const char* key, T& out, std::string_view section) {
  if (!object.contains(key)) return;
  try {
    out = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type", section, key));
  }
}

std::string resolve(const std::filesystem::path& base, const std::string& path) {
  const std::filesystem::path p(path);
  return (p.is_relative() && !base.empty() ? base / p : p).string();
}

LabelRule read_rule(const json& j, std::string_view section, LabelRule rule) {
  reject_unknown(j, section, {"on_threshold", "min_on", "types"});
  read_key(j, "on_threshold", rule.on_threshold, section);
  read_key(j, "min_on", rule.min_on, section);
  return rule;
}

std::string output_path(const std::filesystem::path& dir, std::string_view name) {
  return (dir / std::string(name)).string();
}

}  // namespace

InputFile parse_input_spec(std::string_view spec) {
  InputFile input;
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    input.path = std::string(spec);
    input.appliance.name = std::filesystem::path(input.path).stem().string();
    input.appliance.type_tag = input.appliance.name;
  } else {
    const auto head = spec.substr(0, eq);
    input.path = std::string(spec.substr(eq + 1));
    const auto colon = head.find(':');
    input.appliance.name = std::string(head.substr(0, colon));
    input.appliance.type_tag = colon == std::string_view::npos
                                   ? input.appliance.name
                                   : std::string(head.substr(colon + 1));
  }
  if (input.path.empty() || input.appliance.name.empty() || input.appliance.type_tag.empty()) {
    throw ConfigError(fmt::format("bad input '{}' (expected NAME[:TYPE]=PATH)", spec));
  }
  return input;
}

void PipelineConfig::validate(bool full_run) const {
  train.validate();
  auto check_rule = [](const LabelRule& r, std::string_view what) {
    if (!(r.on_threshold > 0.0)) {
      throw ConfigError(fmt::format("{}: on_threshold must be > 0", what));
    }
    if (r.min_on < 1) throw ConfigError(fmt::format("{}: min_on must be >= 1", what));
  };
  check_rule(labels.defaults, "labels");
  for (const auto& [type, rule] : labels.by_type) check_rule(rule, "labels." + type);
  if (usage.min_gap < 0 || usage.min_len < 0) {
    throw ConfigError("usage.min_gap and usage.min_len must be >= 0");
  }
  if (gap_fill < 0) throw ConfigError("ingest.gap_fill must be >= 0");
  if (user.empty()) throw ConfigError("report.user must not be empty");
  if (!valid_home_id(home)) throw ConfigError(fmt::format("invalid home id '{}'", home));
  if (service_home && !valid_home_id(*service_home)) {
    throw ConfigError(fmt::format("invalid service home id '{}'", *service_home));
  }
  if (full_run) {
    if (!train_day || !test_day) {
      throw ConfigError("pipeline needs both train_day and test_day");
    }
    if (inputs.empty()) throw ConfigError("pipeline needs at least one input file");
  }
}

PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  reject_unknown(root, "config",
                 {"seed", "train", "labels", "usage", "ingest", "report", "pipeline"});
  PipelineConfig c;
  read_key(root, "seed", c.train.seed, "config");

  if (root.contains("train")) {
    const auto& t = root["train"];
    reject_unknown(t, "train",
                   {"backend", "window", "n_trees", "max_depth", "min_leaf", "epochs",
                    "learning_rate", "regularization", "class_weighting", "seed"});
    std::string backend(backend_name(c.train.backend));
    read_key(t, "backend", backend, "train");
    c.train.backend = parse_backend(backend);
    read_key(t, "window", c.train.window, "train");
    read_key(t, "n_trees", c.train.forest.n_trees, "train");
    read_key(t, "max_depth", c.train.forest.max_depth, "train");
    read_key(t, "min_leaf", c.train.forest.min_leaf, "train");
    read_key(t, "epochs", c.train.margin.epochs, "train");
    read_key(t, "learning_rate", c.train.margin.learning_rate, "train");
    read_key(t, "regularization", c.train.margin.regularization, "train");
    read_key(t, "class_weighting", c.train.class_weighting, "train");
    read_key(t, "seed", c.train.seed, "train");
  }
  if (root.contains("labels")) {
    const auto& l = root["labels"];
    c.labels.defaults = read_rule(l, "labels", c.labels.defaults);
    if (l.contains("types")) {
      if (!l["types"].is_object()) throw ConfigError("'labels.types' must be an object");
      for (const auto& [type, rule] : l["types"].items()) {
        c.labels.by_type[type] = read_rule(rule, "labels.types." + type, c.labels.defaults);
      }
    }
  }
  if (root.contains("usage")) {
    reject_unknown(root["usage"], "usage", {"min_gap", "min_len"});
    read_key(root["usage"], "min_gap", c.usage.min_gap, "usage");
    read_key(root["usage"], "min_len", c.usage.min_len, "usage");
  }
  if (root.contains("ingest")) {
    reject_unknown(root["ingest"], "ingest", {"gap_fill"});
    read_key(root["ingest"], "gap_fill", c.gap_fill, "ingest");
  }
  if (root.contains("report")) {
    const auto& r = root["report"];
    reject_unknown(r, "report", {"user", "home", "template"});
    read_key(r, "user", c.user, "report");
    read_key(r, "home", c.home, "report");
    if (r.contains("template")) {
      const auto& t = r["template"];
      try {
        if (t.is_string()) {
          c.report_template = ReportTemplate::builtin(t.get<std::string>());
        } else if (t.is_object() && t.size() == 1 && t.contains("file")) {
          c.report_template = ReportTemplate::from_json(
              read_file(resolve(base_dir, t["file"].get<std::string>())));
        } else {
          c.report_template = ReportTemplate::from_json(t.dump());
        }
      } catch (const TemplateError& e) {
        throw ConfigError(fmt::format("report.template: {}", e.what()));
      }
    }
  }
  if (root.contains("pipeline")) {
    const auto& p = root["pipeline"];
    reject_unknown(p, "pipeline",
                   {"train_day", "test_day", "inputs", "service_url", "service_home"});
    try {
      if (p.contains("train_day")) c.train_day = parse_day(p["train_day"].get<std::string>());
      if (p.contains("test_day")) c.test_day = parse_day(p["test_day"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("pipeline day: {}", e.what()));
    }
    if (p.contains("inputs")) {
      if (!p["inputs"].is_array()) throw ConfigError("'pipeline.inputs' must be an array");
      for (const auto& in : p["inputs"]) {
        if (in.is_string()) {
          auto spec = parse_input_spec(in.get<std::string>());
          spec.path = resolve(base_dir, spec.path);
          c.inputs.push_back(std::move(spec));
          continue;
        }
        reject_unknown(in, "pipeline.inputs[]", {"name", "type", "path"});
        InputFile file;
        read_key(in, "name", file.appliance.name, "pipeline.inputs[]");
        read_key(in, "type", file.appliance.type_tag, "pipeline.inputs[]");
        read_key(in, "path", file.path, "pipeline.inputs[]");
        if (file.appliance.type_tag.empty()) file.appliance.type_tag = file.appliance.name;
        if (file.appliance.name.empty() || file.path.empty()) {
          throw ConfigError("pipeline input needs a name and a path");
        }
        file.path = resolve(base_dir, file.path);
        c.inputs.push_back(std::move(file));
      }
    }
    std::string url;
    read_key(p, "service_url", url, "pipeline");
    if (!url.empty()) c.service_url = url;
    std::string service_home;
    read_key(p, "service_home", service_home, "pipeline");
    if (!service_home.empty()) c.service_home = service_home;
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  return parse_pipeline_config(read_file(path),
                               std::filesystem::path(path).parent_path());
}

std::vector<ApplianceFile> load_inputs(const std::vector<InputFile>& inputs) {
  std::vector<ApplianceFile> files;
  files.reserve(inputs.size());
  for (const auto& in : inputs) {
    files.push_back({in.appliance, read_trace_file(in.path)});
  }
  return files;
}

Synthesized synthesize(const TraceSet& traces, const LabelConfig& labels) {
  return {aggregate(traces), label_set(traces, labels)};
}

ReportArtifacts make_report(const StateMask& mask, const std::string& user,
                            const std::string& home, const ReportTemplate& tpl,
                            const UsageConfig& usage) {
  ReportArtifacts out;
  out.usages = extract_usages(mask, usage);
  std::vector<ApplianceId> catalog;
  for (const auto& row : mask.rows()) catalog.push_back(row.appliance);
  out.behavior = build_model(user, out.usages, catalog, home);
  if (!out.behavior.day) out.behavior.day = mask.day();
  out.text = render_report(out.behavior, tpl);
  return out;
}

PowerTrace fetch_aggregate(const std::string& service_url, const std::string& home,
                           Day day, int gap_fill) {
  StorageClient client(service_url);
  const auto start = day_start_epoch(day);
  const auto measurements = client.query(home, start, start + kSecondsPerDay);
  if (measurements.empty()) {
    throw Error(fmt::format("service has no measurements for home '{}' on {}", home,
                            format_day(day)));
  }
  RawSampleFile raw;
  raw.source = std::string(kAggregateOrigin);
  for (const auto& m : measurements) raw.rows.push_back({m.timestamp, m.watts});
  const PowerTrace trace = resample_to_1hz(raw, gap_fill, day);
  std::vector<double> samples(trace.samples().begin(), trace.samples().end());
  const bool partial = trace.partial();
  samples.resize(kSecondsPerDay, 0.0);
  return PowerTrace(day, std::move(samples), std::string(kAggregateOrigin), partial);
}

PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::filesystem::path& out_dir, TrainOptions options) {
  config.validate(/*full_run=*/true);
  std::filesystem::create_directories(out_dir);
  const auto files = load_inputs(config.inputs);
  const DayConfig day_config{{}, config.gap_fill};

  const TraceSet train_traces = build_day(files, *config.train_day, day_config);
  write_file(output_path(out_dir, artifacts::kTrainTraces), write_trace_set(train_traces));
  const Synthesized train_day = synthesize(train_traces, config.labels);
  write_file(output_path(out_dir, artifacts::kTrainAggregate), write_trace(train_day.aggregate));
  write_file(output_path(out_dir, artifacts::kTrainLabels), write_mask(train_day.labels));

  const DisaggregationModel model =
      train(train_day.aggregate, train_day.labels, config.train, options);
  const std::string model_bytes = save_model(model);
  write_file(output_path(out_dir, artifacts::kModel), model_bytes);

  std::optional<Synthesized> test_day;
  try {
    const TraceSet test_traces = build_day(files, *config.test_day, day_config);
    write_file(output_path(out_dir, artifacts::kTestTraces), write_trace_set(test_traces));
    test_day = synthesize(test_traces, config.labels);
    write_file(output_path(out_dir, artifacts::kTestLabels), write_mask(test_day->labels));
  } catch (const StructuralError& e) {
    if (!config.service_url) throw;
    logger().warn("no ground truth for the test day: {}", e.what());
  }

  const PowerTrace test_aggregate =
      config.service_url
          ? fetch_aggregate(*config.service_url, config.service_home.value_or(config.home),
                            *config.test_day, config.gap_fill)
          : test_day->aggregate;
  write_file(output_path(out_dir, artifacts::kTestAggregate), write_trace(test_aggregate));

  const StateMask predicted = predict(model, test_aggregate);
  write_file(output_path(out_dir, artifacts::kPredicted), write_mask(predicted));

  PipelineResult result;
  if (test_day) {
    ConfusionTable table = confusion(predicted, test_day->labels);
    write_file(output_path(out_dir, artifacts::kMetricsText), format_metrics_table(table));
    write_file(output_path(out_dir, artifacts::kMetricsJson), metrics_to_json(table));
    result.metrics = std::move(table);
  }

  const ReportArtifacts report =
      make_report(predicted, config.user, config.home, config.report_template, config.usage);
  write_file(output_path(out_dir, artifacts::kUsages), export_usages(report.usages));
  write_file(output_path(out_dir, artifacts::kBehavior), serialize_model(report.behavior));
  write_file(output_path(out_dir, artifacts::kReport), report.text);
  result.report = report.text;
  return result;
}

}  // namespace nalm
