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

#include <stdlib.h>

#include <filesystem>
#include <string>

#include <benchmark/benchmark.h>

#include "nalm/storage.hpp"

namespace {

std::filesystem::path fresh_dir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "nalm-bench-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  return pattern;
}

// Each batch is one fsync'd append.
void BM_StoreBatch(benchmark::State& state) {
  const auto dir = fresh_dir();
  const auto size = static_cast<std::size_t>(state.range(0));
  {
    nalm::MeasurementStore store(dir);
    std::vector<nalm::Measurement> batch(size);
    std::int64_t t = 0;
    for (auto _ : state) {
      for (auto& m : batch) m = {t++, 100.0};
      benchmark::DoNotOptimize(store.store("bench", batch));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size));
  }
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_StoreBatch)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_RangeQuery(benchmark::State& state) {
  const auto dir = fresh_dir();
  {
    nalm::MeasurementStore store(dir);
    std::vector<nalm::Measurement> day(86400);
    for (std::size_t i = 0; i < day.size(); ++i) day[i] = {static_cast<std::int64_t>(i), 1.0};
    store.store("bench", day);
    for (auto _ : state) benchmark::DoNotOptimize(store.query("bench", 3600, 3600 + state.range(0)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
  }
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_RangeQuery)->Arg(60)->Arg(3600)->Arg(80000)->Unit(benchmark::kMicrosecond);

void BM_Replay(benchmark::State& state) {
  const auto dir = fresh_dir();
  {
    nalm::MeasurementStore store(dir);
    std::vector<nalm::Measurement> day(86400);
    for (std::size_t i = 0; i < day.size(); ++i) day[i] = {static_cast<std::int64_t>(i), 1.0};
    store.store("bench", day);
  }
  for (auto _ : state) {
    nalm::MeasurementStore reopened(dir);
    benchmark::DoNotOptimize(reopened.homes());
  }
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_Replay)->Unit(benchmark::kMillisecond);

}  // namespace
