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

#include <benchmark/benchmark.h>

#include "nalm/disaggregation.hpp"
#include "nalm/pipeline.hpp"
#include "nalm/synthetic.hpp"

namespace {

const nalm::Synthesized& training_day() {
  static const nalm::Synthesized day = [] {
    const auto scenario = nalm::overlapping_scenario();
    return nalm::synthesize(nalm::generate_day(scenario, scenario.train_day, 42).traces, {});
  }();
  return day;
}

nalm::TrainConfig config_for(nalm::Backend backend) {
  nalm::TrainConfig c;
  c.backend = backend;
  c.forest.n_trees = 10;
  c.margin.epochs = 5;
  return c;
}

void BM_Train(benchmark::State& state) {
  const auto backend = static_cast<nalm::Backend>(state.range(0));
  const auto& day = training_day();
  const auto config = config_for(backend);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nalm::train(day.aggregate, day.labels, config, {1}));
  }
  state.SetLabel(std::string(nalm::backend_name(backend)));
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(nalm::Backend::kForest))
    ->Arg(static_cast<int>(nalm::Backend::kMargin))
    ->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto backend = static_cast<nalm::Backend>(state.range(0));
  const auto& day = training_day();
  const auto model = nalm::train(day.aggregate, day.labels, config_for(backend), {1});
  for (auto _ : state) benchmark::DoNotOptimize(nalm::predict(model, day.aggregate));
  state.SetLabel(std::string(nalm::backend_name(backend)));
  state.SetItemsProcessed(state.iterations() * nalm::kSecondsPerDay);
}
BENCHMARK(BM_Predict)
    ->Arg(static_cast<int>(nalm::Backend::kForest))
    ->Arg(static_cast<int>(nalm::Backend::kMargin))
    ->Unit(benchmark::kMillisecond);

void BM_ModelRoundTrip(benchmark::State& state) {
  const auto& day = training_day();
  const auto model = nalm::train(day.aggregate, day.labels, config_for(nalm::Backend::kForest), {1});
  for (auto _ : state) benchmark::DoNotOptimize(nalm::load_model(nalm::save_model(model)));
}
BENCHMARK(BM_ModelRoundTrip)->Unit(benchmark::kMicrosecond);

}  // namespace
