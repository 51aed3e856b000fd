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

#include "nalm/usage.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace nalm {

StateRow debounce(const StateRow& row, int min_gap, int min_len) {
  if (min_gap < 0 || min_len < 0) {
    throw std::invalid_argument("debounce parameters must be >= 0");
  }
  StateRow out = row;
  const std::size_t n = out.size();
  const auto gap = static_cast<std::size_t>(min_gap);
  const auto len = static_cast<std::size_t>(min_len);

  // Pass 1: close short OFF gaps between two ON runs.
  std::size_t t = 0;
  while (t < n && !out[t]) ++t;  // leading OFF run is not surrounded
  while (t < n) {
    if (out[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < n && !out[end]) ++end;
    if (end < n && end - t < gap) {
      for (std::size_t i = t; i < end; ++i) out[i] = true;
    }
    t = end;
  }

  // Pass 2: drop short ON runs.
  t = 0;
  while (t < n) {
    if (!out[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < n && out[end]) ++end;
    if (end - t < len) {
      for (std::size_t i = t; i < end; ++i) out[i] = false;
    }
    t = end;
  }
  return out;
}

std::vector<UsageInterval> extract_usages(const StateMask& mask,
                                          const UsageConfig& config) {
  std::vector<UsageInterval> usages;
  for (const auto& [appliance, states] : mask.rows()) {
    const StateRow row = debounce(states, config.min_gap, config.min_len);
    const std::size_t n = row.size();
    std::size_t t = 0;
    while (t < n) {
      if (!row[t]) {
        ++t;
        continue;
      }
      std::size_t end = t;
      while (end < n && row[end]) ++end;
      usages.push_back({appliance, mask.day(), static_cast<int>(t),
                        static_cast<int>(end)});
      t = end;
    }
  }
  return usages;
}

StateRow paint_intervals(const std::vector<UsageInterval>& intervals,
                         std::size_t length) {
  StateRow row(length, false);
  for (const auto& u : intervals) {
    for (int s = u.start; s < u.stop; ++s) row.at(static_cast<std::size_t>(s)) = true;
  }
  return row;
}

std::string format_iso8601(Day day, int seconds) {
  const auto epoch = day_start_epoch(day) + seconds;
  const Day actual = day_of_epoch(epoch);
  return fmt::format("{}T{}", format_day(actual),
                     format_hhmmss(static_cast<int>(epoch - day_start_epoch(actual))));
}

std::string export_usages(const std::vector<UsageInterval>& usages) {
  std::string out;
  for (const auto& u : usages) {
    fmt::format_to(std::back_inserter(out), "{},{},{}\n", u.appliance.name,
                   format_iso8601(u.day, u.start), format_iso8601(u.day, u.stop));
  }
  return out;
}

}  // namespace nalm
