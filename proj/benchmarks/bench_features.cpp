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

#include "nalm/features.hpp"

namespace {

nalm::PowerTrace noisy_day() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> watts(0.0, 2000.0);
  std::vector<double> samples(nalm::kSecondsPerDay);
  for (auto& w : samples) w = watts(rng);
  return nalm::PowerTrace(nalm::Day{std::chrono::year{2024}, std::chrono::January, std::chrono::day{1}},
                          std::move(samples), "bench");
}

void BM_FeatureMatrix(benchmark::State& state) {
  const auto trace = noisy_day();
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nalm::build_feature_matrix(trace, window));
  state.SetItemsProcessed(state.iterations() * nalm::kSecondsPerDay);
}
BENCHMARK(BM_FeatureMatrix)->Arg(3)->Arg(9)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_BinnerFitTransform(benchmark::State& state) {
  const auto features = nalm::build_feature_matrix(noisy_day(), 9);
  for (auto _ : state) {
    const auto binner = nalm::QuantileBinner::fit(features);
    benchmark::DoNotOptimize(binner.transform(features));
  }
}
BENCHMARK(BM_BinnerFitTransform)->Unit(benchmark::kMillisecond);

}  // namespace
