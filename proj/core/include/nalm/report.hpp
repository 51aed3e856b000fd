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

#ifndef NALM_REPORT_HPP_
#define NALM_REPORT_HPP_

#include <string>
#include <string_view>

#include "nalm/behavior.hpp"

namespace nalm {

/// Sentence patterns for natural-language reports.
///
/// Patterns contain `{slot}` placeholders (`{{` and `}}` are literal
/// braces). Slots available by pattern:
///
///   sentence (per usage):      user home day appliance type start stop
///   sentence (per appliance):  user home day appliance type ranges
///   range:                     start stop
///   header, empty:             user home day
///
/// `{ranges}` joins one `range` per usage of the appliance with
/// `range_separator`, using `range_last_separator` before the final one.
struct ReportTemplate {
  enum class Grouping { kPerUsage, kPerAppliance };

  Grouping grouping = Grouping::kPerUsage;
  std::string sentence = "{user} was using the {appliance} from {start} to {stop}.";
  std::string range = "from {start} to {stop}";
  std::string range_separator = ", ";
  std::string range_last_separator = " and ";
  /// Optional first line; omitted when empty.
  std::string header;
  /// Emitted instead of usage sentences when there are none.
  std::string empty = "No appliance usage detected.";

  /// Built-in templates: "default", "per-appliance", "daily-summary".
  /// Throws TemplateError for other names.
  static ReportTemplate builtin(std::string_view name);

  /// JSON object with any of the keys grouping ("per-usage" |
  /// "per-appliance"), sentence, range, range_separator,
  /// range_last_separator, header, empty. Missing keys keep defaults.
  static ReportTemplate from_json(std::string_view text);
};

/// One line per usage (or per appliance with usages) in model order, times
/// as 24-hour HH:MM truncated to the minute. Every line ends in '\n'.
/// Throws TemplateError naming the first slot that cannot be resolved.
std::string render_report(const BehaviorModel& model,
                          const ReportTemplate& report_template = {});

}  // namespace nalm

#endif  // NALM_REPORT_HPP_
