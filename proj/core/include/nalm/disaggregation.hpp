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

#ifndef NALM_DISAGGREGATION_HPP_
#define NALM_DISAGGREGATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nalm/features.hpp"
#include "nalm/forest.hpp"
#include "nalm/margin.hpp"
#include "nalm/trace.hpp"

namespace nalm {

enum class Backend : std::uint8_t { kForest = 0, kMargin = 1 };

std::string_view backend_name(Backend backend);
/// Accepts "forest" and "margin". Throws ConfigError otherwise.
Backend parse_backend(std::string_view name);

struct TrainConfig {
  int window = 9;
  Backend backend = Backend::kForest;
  ForestParams forest;
  MarginParams margin;
  std::uint64_t seed = 0;
  /// Weight examples by inverse class frequency.
  bool class_weighting = true;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Runtime knobs that never change the trained model.
struct TrainOptions {
  /// Worker threads for training; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Single-class predictor for appliances whose training labels never change.
struct ConstantClassifier {
  bool on = false;
  friend bool operator==(const ConstantClassifier&, const ConstantClassifier&) = default;
};

using Classifier = std::variant<ConstantClassifier, Forest, MarginClassifier>;

struct ApplianceClassifier {
  ApplianceId appliance;
  Classifier classifier;

  friend bool operator==(const ApplianceClassifier&, const ApplianceClassifier&) = default;
};

/// Trained per-appliance ON/OFF classifiers sharing one feature pipeline.
struct DisaggregationModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  TrainConfig config;
  QuantileBinner binner;
  Standardizer standardizer;
  /// Ordered by appliance name.
  std::vector<ApplianceClassifier> classifiers;

  std::vector<ApplianceId> appliances() const;
  friend bool operator==(const DisaggregationModel&, const DisaggregationModel&) = default;
};

/// Fits one binary classifier per appliance row of `labels` against
/// features of `aggregate`. Deterministic in (aggregate, labels, config);
/// the thread count in `options` does not affect the result.
///
/// Throws StructuralError when the lengths differ, the label set is empty,
/// or the aggregate is flagged partial; ConfigError on an invalid config.
DisaggregationModel train(const PowerTrace& aggregate, const StateMask& labels,
                          const TrainConfig& config, TrainOptions options = {});

/// Per-second states for every appliance in the model, or only for the
/// names in `only` when it is non-empty.
///
/// Throws StructuralError when `aggregate` is not a full day or `only`
/// names an appliance the model was not trained on.
StateMask predict(const DisaggregationModel& model, const PowerTrace& aggregate,
                  std::span<const std::string> only = {});

/// Binary container:
///
///   "NALM-MODEL" | u32 version | payload | u32 crc32(everything before)
///
/// All integers little-endian, reals as IEEE-754 binary64. Loading checks
/// the magic, then the version, then the checksum, and throws
/// ModelFormatError (UnsupportedVersionError for the version) rather than
/// return a partial model.
std::string save_model(const DisaggregationModel& model);
DisaggregationModel load_model(std::string_view bytes);

}  // namespace nalm

#endif  // NALM_DISAGGREGATION_HPP_
