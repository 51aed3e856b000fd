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


// nalm: command-line front end for the disaggregation toolkit.

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nalm/behavior.hpp"
#include "nalm/disaggregation.hpp"
#include "nalm/error.hpp"
#include "nalm/evaluation.hpp"
#include "nalm/formats.hpp"
#include "nalm/ingest.hpp"
#include "nalm/log.hpp"
#include "nalm/pipeline.hpp"
#include "nalm/report.hpp"
#include "nalm/storage.hpp"
#include "nalm/synthetic.hpp"
#include "nalm/usage.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nalm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out;
  unsigned threads = 0;
  bool verbose = false;
  bool quiet = false;
};

PipelineConfig base_config(const Globals& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{}
                                           : load_pipeline_config(g.config_path);
  if (g.seed) c.train.seed = *g.seed;
  return c;
}

std::string require_out(const Globals& g, std::string_view command) {
  if (g.out.empty()) throw ConfigError(fmt::format("{}: --out is required", command));
  return g.out;
}

// Writes to --out when given, else to stdout.
void emit(const Globals& g, std::string_view text) {
  if (g.out.empty()) {
    std::cout << text << std::flush;
  } else {
    write_file(g.out, text);
  }
}

Day parse_day_arg(const std::string& text) {
  try {
    return parse_day(text);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("bad day '{}': {}", text, e.what()));
  }
}

ReportTemplate template_arg(const std::string& value) {
  if (value == "default" || value == "per-appliance" || value == "daily-summary") {
    return ReportTemplate::builtin(value);
  }
  try {
    return ReportTemplate::from_json(read_file(value));
  } catch (const TemplateError& e) {
    throw ConfigError(fmt::format("template '{}': {}", value, e.what()));
  }
}

// ingest ---------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> files;
  std::string day;
  std::optional<int> gap_fill;
};

void cmd_ingest(const Globals& g, const IngestArgs& a) {
  const PipelineConfig c = base_config(g);
  const std::string out = require_out(g, "ingest");
  std::vector<InputFile> inputs;
  for (const auto& spec : a.files) inputs.push_back(parse_input_spec(spec));
  const auto files = load_inputs(inputs);
  const Day day = a.day.empty() ? day_of_epoch(files.front().file.rows.empty()
                                                   ? 0
                                                   : files.front().file.rows.front().epoch_seconds)
                                : parse_day_arg(a.day);
  const TraceSet traces = build_day(files, day, {{}, a.gap_fill.value_or(c.gap_fill)});
  write_file(out, write_trace_set(traces));
  logger().info("wrote {} traces for {}", traces.size(), format_day(day));
}

// synthesize -----------------------------------------------------------

struct SynthesizeArgs {
  std::string archive;
  std::string aggregate_out;
  std::string labels_out;
};

void cmd_synthesize(const Globals& g, const SynthesizeArgs& a) {
  const PipelineConfig c = base_config(g);
  const TraceSet traces = read_trace_set(read_file(a.archive));
  const Synthesized s = synthesize(traces, c.labels);
  std::string aggregate_out = a.aggregate_out;
  std::string labels_out = a.labels_out;
  if (!g.out.empty()) {
    if (aggregate_out.empty()) aggregate_out = (fs::path(g.out) / "aggregate.csv").string();
    if (labels_out.empty()) labels_out = (fs::path(g.out) / "labels.csv").string();
  }
  if (aggregate_out.empty() || labels_out.empty()) {
    throw ConfigError("synthesize: give --out DIR or both --aggregate-out and --labels-out");
  }
  write_file(aggregate_out, write_trace(s.aggregate));
  write_file(labels_out, write_mask(s.labels));
}

// train ----------------------------------------------------------------

struct TrainArgs {
  std::string aggregate;
  std::string labels;
  std::optional<std::string> backend;
  std::optional<int> window;
  std::optional<int> n_trees;
  std::optional<int> max_depth;
  std::optional<int> min_leaf;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<double> regularization;
  bool no_class_weighting = false;
};

void cmd_train(const Globals& g, const TrainArgs& a) {
  PipelineConfig c = base_config(g);
  const std::string out = require_out(g, "train");
  TrainConfig& t = c.train;
  if (a.backend) t.backend = parse_backend(*a.backend);
  if (a.window) t.window = *a.window;
  if (a.n_trees) t.forest.n_trees = *a.n_trees;
  if (a.max_depth) t.forest.max_depth = *a.max_depth;
  if (a.min_leaf) t.forest.min_leaf = *a.min_leaf;
  if (a.epochs) t.margin.epochs = *a.epochs;
  if (a.learning_rate) t.margin.learning_rate = *a.learning_rate;
  if (a.regularization) t.margin.regularization = *a.regularization;
  if (a.no_class_weighting) t.class_weighting = false;
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const PowerTrace aggregate = read_trace(read_file(a.aggregate));
  const StateMask labels = read_mask(read_file(a.labels));
  const auto model = train(aggregate, labels, t, TrainOptions{g.threads});
  write_file(out, save_model(model));
  logger().info("trained {} classifiers ({})", model.classifiers.size(),
                backend_name(t.backend));
}

// predict --------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string aggregate;
  std::vector<std::string> only;
};

void cmd_predict(const Globals& g, const PredictArgs& a) {
  const std::string out = require_out(g, "predict");
  const auto model = load_model(read_file(a.model));
  const PowerTrace aggregate = read_trace(read_file(a.aggregate));
  write_file(out, write_mask(predict(model, aggregate, a.only)));
}

// evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string predicted;
  std::string truth;
  std::string counts;
  bool json = false;
};

void cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  ConfusionTable table;
  if (!a.counts.empty()) {
    if (!a.predicted.empty() || !a.truth.empty()) {
      throw ConfigError("evaluate: --counts excludes mask arguments");
    }
    table = parse_counts_table(read_file(a.counts));
  } else {
    if (a.predicted.empty() || a.truth.empty()) {
      throw ConfigError("evaluate: need PREDICTED and TRUTH masks, or --counts FILE");
    }
    table = confusion(read_mask(read_file(a.predicted)), read_mask(read_file(a.truth)));
  }
  emit(g, a.json ? metrics_to_json(table) : format_metrics_table(table));
}

// report ---------------------------------------------------------------

struct ReportArgs {
  std::string mask;
  std::optional<std::string> user;
  std::optional<std::string> home;
  std::optional<std::string> tpl;
  std::optional<int> min_gap;
  std::optional<int> min_len;
  std::string usages_out;
  std::string behavior_out;
};

void apply_report_overrides(PipelineConfig& c, const ReportArgs& a) {
  if (a.user) c.user = *a.user;
  if (a.home) c.home = *a.home;
  if (a.tpl) c.report_template = template_arg(*a.tpl);
  if (a.min_gap) c.usage.min_gap = *a.min_gap;
  if (a.min_len) c.usage.min_len = *a.min_len;
  c.validate();
}

void cmd_report(const Globals& g, const ReportArgs& a) {
  PipelineConfig c = base_config(g);
  apply_report_overrides(c, a);
  const StateMask mask = read_mask(read_file(a.mask));
  const ReportArtifacts r = make_report(mask, c.user, c.home, c.report_template, c.usage);
  if (!a.usages_out.empty()) write_file(a.usages_out, export_usages(r.usages));
  if (!a.behavior_out.empty()) write_file(a.behavior_out, serialize_model(r.behavior));
  emit(g, r.text);
}

// serve ----------------------------------------------------------------

struct ServeArgs {
  std::string listen;
  std::string data_dir;
  std::optional<std::size_t> max_batch;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

void cmd_serve(const Globals&, const ServeArgs& a) {
  ServiceConfig config;
  const std::string listen =
      !a.listen.empty() ? a.listen : env_or("NALM_LISTEN", "127.0.0.1:8080");
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw ConfigError(fmt::format("--listen wants HOST:PORT, got '{}'", listen));
  }
  config.host = listen.substr(0, colon);
  try {
    std::size_t used = 0;
    config.port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1 || config.port < 0 || config.port > 65535) {
      throw std::out_of_range("port");
    }
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("bad port in '{}'", listen));
  }
  config.data_dir = !a.data_dir.empty() ? a.data_dir : env_or("NALM_DATA_DIR", "nalm-data");
  if (a.max_batch) {
    config.max_batch = *a.max_batch;
  } else if (const auto env = env_or("NALM_MAX_BATCH", ""); !env.empty()) {
    try {
      config.max_batch = std::stoul(env);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad NALM_MAX_BATCH '{}'", env));
    }
  }
  if (config.max_batch == 0) throw ConfigError("max batch must be >= 1");

  // Signals are taken synchronously by a watcher thread so that stop()
  // never runs inside a signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  StorageService service(config);
  const int port = service.bind();
  fmt::print("listening on {}:{}\n", config.host, port);
  std::fflush(stdout);

  std::jthread watcher([&service, signals] {
    int received = 0;
    sigwait(&signals, &received);
    logger().info("signal {}, shutting down", received);
    service.stop();
  });
  service.serve();
  // Wake the watcher if serve() ended on its own.
  pthread_kill(watcher.native_handle(), SIGTERM);
}

// pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::optional<std::string> service_url;
  ReportArgs report;
};

void cmd_pipeline(const Globals& g, const PipelineArgs& a) {
  if (g.config_path.empty()) throw ConfigError("pipeline: --config is required");
  PipelineConfig c = base_config(g);
  if (a.service_url) c.service_url = *a.service_url;
  apply_report_overrides(c, a.report);
  const std::string out = require_out(g, "pipeline");
  const PipelineResult result = run_pipeline(c, out, TrainOptions{g.threads});
  std::cout << result.report << std::flush;
}

// generate -------------------------------------------------------------

struct GenerateArgs {
  std::string scenario;
};

// Rows only where the level changes, plus a keep-alive row whenever the
// forward-fill limit would otherwise run out.
RawSampleFile encode_day(const PowerTrace& trace, int gap_fill) {
  RawSampleFile raw;
  const auto start = day_start_epoch(trace.day());
  std::optional<double> last;
  int last_at = 0;
  const auto& samples = trace.samples();
  for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
    const double w = samples[static_cast<std::size_t>(s)];
    if (!last || w != *last || s - last_at >= gap_fill || s + 1 == kSecondsPerDay) {
      raw.rows.push_back({start + s, w});
      last = w;
      last_at = s;
    }
  }
  return raw;
}

void cmd_generate(const Globals& g, const GenerateArgs& a) {
  const Scenario scenario = scenario_by_name(a.scenario);
  const fs::path out = require_out(g, "generate");
  const std::uint64_t seed = g.seed.value_or(42);
  fs::create_directories(out);

  std::vector<SyntheticDay> days;
  for (const Day day : {scenario.train_day, scenario.test_day}) {
    days.push_back(generate_day(scenario, day, seed));
  }
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& appliance : scenario.appliances) {
    RawSampleFile merged;
    for (const auto& day : days) {
      const auto* member = day.traces.find(appliance.id.name);
      auto part = encode_day(member->trace, kDefaultGapFill);
      merged.rows.insert(merged.rows.end(), part.rows.begin(), part.rows.end());
    }
    const std::string file = appliance.id.name + ".csv";
    write_file((out / file).string(), serialize_trace_file(merged));
    inputs.push_back({{"name", appliance.id.name},
                      {"type", appliance.id.type_tag},
                      {"path", file}});
  }
  nlohmann::ordered_json config;
  config["seed"] = seed;
  config["pipeline"] = {{"train_day", format_day(scenario.train_day)},
                        {"test_day", format_day(scenario.test_day)},
                        {"inputs", inputs}};
  write_file((out / "pipeline.json").string(), config.dump(2) + "\n");
  for (std::size_t i = 0; i < days.size(); ++i) {
    write_file((out / fmt::format("truth_{}.csv", format_day(days[i].truth.day()))).string(),
               write_mask(days[i].truth));
  }
}

// push -----------------------------------------------------------------

struct PushArgs {
  std::string file;
  std::string url = "http://127.0.0.1:8080";
  std::string home = std::string(kDefaultHomeId);
  std::size_t batch = 10000;
};

void cmd_push(const Globals&, const PushArgs& a) {
  if (a.batch == 0) throw ConfigError("--batch must be >= 1");
  const RawSampleFile raw = read_trace_file(a.file);
  StorageClient client(a.url);
  std::size_t sent = 0;
  std::vector<Measurement> batch;
  for (std::size_t i = 0; i < raw.rows.size(); i += a.batch) {
    batch.clear();
    for (std::size_t j = i; j < std::min(raw.rows.size(), i + a.batch); ++j) {
      batch.push_back({raw.rows[j].epoch_seconds, raw.rows[j].watts});
    }
    sent += client.store(a.home, batch);
  }
  logger().info("pushed {} measurements to home '{}'", sent, a.home);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-intrusive appliance load monitoring toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nalm 0.1.0");

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--config", g.config_path, "Pipeline config (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", g.out, "Output file or directory");
  app.add_option("--threads", g.threads, "Training threads (0 = all cores)");
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");
  app.add_flag("-q,--quiet", g.quiet, "Log errors only");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Resample appliance files into a trace archive");
  c_ingest->add_option("files", ingest.files, "NAME:TYPE=PATH, NAME=PATH or PATH")
      ->required();
  c_ingest->add_option("--day", ingest.day, "Day to extract (YYYY-MM-DD)");
  c_ingest->add_option("--gap-fill", ingest.gap_fill, "Forward-fill limit in seconds");

  SynthesizeArgs synth;
  auto* c_synth = app.add_subcommand("synthesize", "Aggregate an archive and label it");
  c_synth->add_option("archive", synth.archive, "Trace archive from ingest")->required()->check(CLI::ExistingFile);
  c_synth->add_option("--aggregate-out", synth.aggregate_out, "Aggregate trace file");
  c_synth->add_option("--labels-out", synth.labels_out, "Label mask file");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Fit a disaggregation model");
  c_train->add_option("aggregate", tr.aggregate)->required()->check(CLI::ExistingFile);
  c_train->add_option("labels", tr.labels)->required()->check(CLI::ExistingFile);
  c_train->add_option("--backend", tr.backend, "forest or margin")->check(CLI::IsMember({"forest", "margin"}));
  c_train->add_option("--window", tr.window, "Odd feature window in seconds");
  c_train->add_option("--trees", tr.n_trees, "Forest size");
  c_train->add_option("--max-depth", tr.max_depth);
  c_train->add_option("--min-leaf", tr.min_leaf);
  c_train->add_option("--epochs", tr.epochs, "Margin training passes");
  c_train->add_option("--learning-rate", tr.learning_rate);
  c_train->add_option("--regularization", tr.regularization);
  c_train->add_flag("--no-class-weighting", tr.no_class_weighting);

  PredictArgs pr;
  auto* c_predict = app.add_subcommand("predict", "Per-second ON/OFF states from an aggregate");
  c_predict->add_option("model", pr.model)->required()->check(CLI::ExistingFile);
  c_predict->add_option("aggregate", pr.aggregate)->required()->check(CLI::ExistingFile);
  c_predict->add_option("--only", pr.only, "Restrict to these appliances")->delimiter(',');

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Confusion counts and metrics");
  c_eval->add_option("predicted", ev.predicted)->check(CLI::ExistingFile);
  c_eval->add_option("truth", ev.truth)->check(CLI::ExistingFile);
  c_eval->add_option("--counts", ev.counts, "name,tp,fp,tn,fn table")
      ->check(CLI::ExistingFile);
  c_eval->add_flag("--json", ev.json);

  auto add_report_options = [](CLI::App* cmd, ReportArgs& r) {
    cmd->add_option("--user", r.user, "Name used in the report");
    cmd->add_option("--home", r.home, "Home id in the behavior model");
    cmd->add_option("--template", r.tpl, "default, per-appliance, daily-summary or a JSON file");
    cmd->add_option("--min-gap", r.min_gap, "Bridge OFF gaps shorter than this (s)");
    cmd->add_option("--min-len", r.min_len, "Drop usages shorter than this (s)");
  };
  ReportArgs rp;
  auto* c_report = app.add_subcommand("report", "Usages, behavior model and text");
  c_report->add_option("mask", rp.mask, "Predicted state mask")->required()->check(CLI::ExistingFile);
  add_report_options(c_report, rp);
  c_report->add_option("--usages-out", rp.usages_out, "Usage list (CSV)");
  c_report->add_option("--behavior-out", rp.behavior_out, "Behavior model (XML)");

  ServeArgs sv;
  auto* c_serve = app.add_subcommand("serve", "Run the measurement storage service");
  c_serve->add_option("--listen", sv.listen, "HOST:PORT (env NALM_LISTEN)");
  c_serve->add_option("--data-dir", sv.data_dir, "Log directory (env NALM_DATA_DIR)");
  c_serve->add_option("--max-batch", sv.max_batch, "Largest accepted batch (env NALM_MAX_BATCH)");

  PipelineArgs pl;
  auto* c_pipeline = app.add_subcommand("pipeline", "ingest through report in one go");
  c_pipeline->add_option("--service-url", pl.service_url, "Read the test-day aggregate from this storage service");
  add_report_options(c_pipeline, pl.report);

  GenerateArgs gen;
  auto* c_generate = app.add_subcommand("generate", "Write a bundled synthetic scenario");
  c_generate->add_option("scenario", gen.scenario)
      ->required()
      ->check(CLI::IsMember({"separable", "overlapping"}));

  PushArgs pu;
  auto* c_push = app.add_subcommand("push", "Upload a trace file to the storage service");
  c_push->add_option("file", pu.file, "Trace file (epoch,watts or Tracebase)")->required()->check(CLI::ExistingFile);
  c_push->add_option("--url", pu.url, "Service base URL");
  c_push->add_option("--home", pu.home, "Target home id");
  c_push->add_option("--batch", pu.batch, "Measurements per request");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  logger().set_level(g.quiet     ? spdlog::level::err
                     : g.verbose ? spdlog::level::info
                                 : spdlog::level::warn);
  try {
    if (*c_ingest) cmd_ingest(g, ingest);
    if (*c_synth) cmd_synthesize(g, synth);
    if (*c_train) cmd_train(g, tr);
    if (*c_predict) cmd_predict(g, pr);
    if (*c_eval) cmd_evaluate(g, ev);
    if (*c_report) cmd_report(g, rp);
    if (*c_serve) cmd_serve(g, sv);
    if (*c_pipeline) cmd_pipeline(g, pl);
    if (*c_generate) cmd_generate(g, gen);
    if (*c_push) cmd_push(g, pu);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "nalm: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "nalm: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
