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

#ifndef NALM_EVALUATION_HPP_
#define NALM_EVALUATION_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/trace.hpp"

namespace nalm {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricSet {
  double precision = 0.0;  // TP / (TP + FP)
  double accuracy = 0.0;   // (TP + TN) / total
  double tpr = 0.0;        // TP / (TP + FN)
  double tnr = 0.0;        // TN / (TN + FP)
  double f1 = 0.0;         // 2TP / (2TP + FP + FN)
  /// Set when any ratio was 0/0 and reported as 0.
  bool degenerate = false;
};

/// Throws std::invalid_argument when every count is zero.
MetricSet metrics(const ConfusionCounts& counts);

struct ConfusionTable {
  struct Row {
    std::string appliance;
    ConfusionCounts counts;
  };
  std::vector<Row> rows;
  ConfusionCounts overall;

  /// Throws StructuralError unless every row covers the same sample count.
  void check_equal_totals() const;
};

/// Per-appliance counts plus their sum. Throws StructuralError unless both
/// masks hold the same appliances and length.
ConfusionTable confusion(const StateMask& predicted, const StateMask& truth);

/// Reads `name,tp,fp,tn,fn` rows (an optional header line starting with
/// `name` is skipped). A row named `Overall` becomes the overall counts;
/// otherwise they are summed. Row totals must agree.
ConfusionTable parse_counts_table(std::string_view text);

/// Fixed-width table, three decimals, columns Prec. Acc. TPR TNR F1.
std::string format_metrics_table(const ConfusionTable& table);

/// Full-precision machine-readable report with counts and metrics.
std::string metrics_to_json(const ConfusionTable& table);

}  // namespace nalm

#endif  // NALM_EVALUATION_HPP_
