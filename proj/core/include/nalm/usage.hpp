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

#ifndef NALM_USAGE_HPP_
#define NALM_USAGE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "nalm/trace.hpp"

namespace nalm {

/// One contiguous ON period of an appliance, as the half-open range of
/// seconds [start, stop). `stop` is the first OFF second and may equal
/// 86400 when the run is still open at the end of the day.
struct UsageInterval {
  ApplianceId appliance;
  Day day;
  int start = 0;
  int stop = 0;

  Timestamp start_time() const { return Timestamp(day, start); }
  int duration() const { return stop - start; }

  friend bool operator==(const UsageInterval&, const UsageInterval&) = default;
};

struct UsageConfig {
  int min_gap = 60;
  int min_len = 120;
};

/// Fills interior OFF runs shorter than `min_gap` (those with ON on both
/// sides), then clears ON runs shorter than `min_len`. Throws
/// std::invalid_argument on negative parameters.
StateRow debounce(const StateRow& row, int min_gap, int min_len);

/// One interval per maximal ON run of each debounced row, grouped by
/// appliance (name order) and sorted by start within an appliance.
std::vector<UsageInterval> extract_usages(const StateMask& mask,
                                          const UsageConfig& config);

/// Paints intervals onto an all-OFF row of `length` seconds.
StateRow paint_intervals(const std::vector<UsageInterval>& intervals,
                         std::size_t length);

/// `YYYY-MM-DDTHH:MM:SS`; second 86400 is written as the next day's
/// midnight.
std::string format_iso8601(Day day, int seconds_since_day_start);

/// Newline-terminated `appliance,start_iso8601,stop_iso8601` records.
std::string export_usages(const std::vector<UsageInterval>& usages);

}  // namespace nalm

#endif  // NALM_USAGE_HPP_
