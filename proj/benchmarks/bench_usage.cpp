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

#include <benchmark/benchmark.h>

#include "nalm/behavior.hpp"
#include "nalm/evaluation.hpp"
#include "nalm/report.hpp"
#include "nalm/usage.hpp"

namespace {

const nalm::Day kDay{std::chrono::year{2024}, std::chrono::January, std::chrono::day{1}};

nalm::StateRow flickering_row(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> run(1, 300);
  nalm::StateRow row(nalm::kSecondsPerDay);
  bool on = false;
  for (std::size_t t = 0; t < row.size();) {
    for (int k = run(rng); k > 0 && t < row.size(); --k) row[t++] = on;
    on = !on;
  }
  return row;
}

void BM_Debounce(benchmark::State& state) {
  const auto row = flickering_row(1);
  for (auto _ : state) benchmark::DoNotOptimize(nalm::debounce(row, 60, 120));
  state.SetItemsProcessed(state.iterations() * nalm::kSecondsPerDay);
}
BENCHMARK(BM_Debounce)->Unit(benchmark::kMicrosecond);

void BM_Confusion(benchmark::State& state) {
  nalm::StateMask predicted(kDay, nalm::kSecondsPerDay);
  nalm::StateMask truth(kDay, nalm::kSecondsPerDay);
  for (int a = 0; a < 6; ++a) {
    const std::string name = "app" + std::to_string(a);
    predicted.insert({name, name}, flickering_row(10 + a));
    truth.insert({name, name}, flickering_row(20 + a));
  }
  for (auto _ : state) benchmark::DoNotOptimize(nalm::confusion(predicted, truth));
}
BENCHMARK(BM_Confusion)->Unit(benchmark::kMillisecond);

void BM_ReportAndInterchange(benchmark::State& state) {
  nalm::StateMask mask(kDay, nalm::kSecondsPerDay);
  for (int a = 0; a < 6; ++a) {
    const std::string name = "app" + std::to_string(a);
    mask.insert({name, name}, flickering_row(30 + a));
  }
  const auto usages = nalm::extract_usages(mask, {});
  std::vector<nalm::ApplianceId> catalog;
  for (const auto& row : mask.rows()) catalog.push_back(row.appliance);
  for (auto _ : state) {
    const auto model = nalm::build_model("user", usages, catalog);
    benchmark::DoNotOptimize(nalm::render_report(model));
    benchmark::DoNotOptimize(nalm::deserialize_model(nalm::serialize_model(model)));
  }
  state.SetLabel(std::to_string(usages.size()) + " usages");
}
BENCHMARK(BM_ReportAndInterchange)->Unit(benchmark::kMillisecond);

}  // namespace
