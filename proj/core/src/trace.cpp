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

#include "nalm/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nalm/error.hpp"
#include "nalm/log.hpp"

namespace nalm {
namespace {

int parse_fixed_int(std::string_view text, std::string_view what) {
  if (text.empty()) throw ParseError(fmt::format("empty {}", what));
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw ParseError(fmt::format("bad {} '{}'", what, text));
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

template <typename Vec>
auto find_by_name(const Vec& items, std::string_view name) {
  return std::lower_bound(
      items.begin(), items.end(), name,
      [](const auto& item, std::string_view key) {
        return item.appliance.name < key;
      });
}

}  // namespace

Day parse_day(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError(fmt::format("expected YYYY-MM-DD, got '{}'", text));
  }
  Day day{std::chrono::year{parse_fixed_int(text.substr(0, 4), "year")},
          std::chrono::month{static_cast<unsigned>(
              parse_fixed_int(text.substr(5, 2), "month"))},
          std::chrono::day{static_cast<unsigned>(
              parse_fixed_int(text.substr(8, 2), "day"))}};
  if (!day.ok()) throw ParseError(fmt::format("invalid date '{}'", text));
  return day;
}

std::string format_day(Day day) {
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(day.year()),
                     static_cast<unsigned>(day.month()),
                     static_cast<unsigned>(day.day()));
}

std::int64_t day_start_epoch(Day day) {
  const std::chrono::sys_days days{day};
  return static_cast<std::int64_t>(days.time_since_epoch().count()) *
         kSecondsPerDay;
}

Day day_of_epoch(std::int64_t epoch_seconds) {
  auto days = epoch_seconds / kSecondsPerDay;
  if (epoch_seconds % kSecondsPerDay < 0) --days;
  return Day{std::chrono::sys_days{std::chrono::days{days}}};
}

Timestamp::Timestamp(Day day, int seconds_since_day_start)
    : day_(day), seconds_(seconds_since_day_start) {
  if (seconds_ < 0 || seconds_ >= kSecondsPerDay) {
    throw std::out_of_range(
        fmt::format("second of day {} outside [0, 86400)", seconds_));
  }
}

std::string format_hhmm(int s) {
  return fmt::format("{:02}:{:02}", s / 3600, (s % 3600) / 60);
}

std::string format_hhmmss(int s) {
  return fmt::format("{:02}:{:02}:{:02}", s / 3600, (s % 3600) / 60, s % 60);
}

int parse_hhmmss(std::string_view text) {
  if (text.size() != 8 || text[2] != ':' || text[5] != ':') {
    throw ParseError(fmt::format("expected HH:MM:SS, got '{}'", text));
  }
  const int h = parse_fixed_int(text.substr(0, 2), "hour");
  const int m = parse_fixed_int(text.substr(3, 2), "minute");
  const int s = parse_fixed_int(text.substr(6, 2), "second");
  const int total = h * 3600 + m * 60 + s;
  if (m > 59 || s > 59 || total > kSecondsPerDay) {
    throw ParseError(fmt::format("time of day out of range '{}'", text));
  }
  return total;
}

PowerTrace::PowerTrace(Day day, std::vector<double> samples,
                       std::string origin, bool partial)
    : day_(day),
      samples_(std::move(samples)),
      origin_(std::move(origin)),
      partial_(partial) {
  for (std::size_t t = 0; t < samples_.size(); ++t) {
    if (!std::isfinite(samples_[t]) || samples_[t] < 0.0) {
      throw std::invalid_argument(fmt::format(
          "trace '{}': sample {} is {} (watts must be finite and >= 0)",
          origin_, t, samples_[t]));
    }
  }
  if (!partial_ && samples_.size() != static_cast<std::size_t>(kSecondsPerDay)) {
    throw StructuralError(fmt::format(
        "trace '{}' has {} samples; full days hold 86400 (flag it partial)",
        origin_, samples_.size()));
  }
}

void TraceSet::insert(ApplianceId appliance, PowerTrace trace) {
  if (appliance.name.empty()) {
    throw StructuralError("appliance name must not be empty");
  }
  if (trace.day() != day_) {
    throw StructuralError(fmt::format("appliance '{}': trace day {} != set day {}",
                                      appliance.name, format_day(trace.day()),
                                      format_day(day_)));
  }
  if (!members_.empty() && trace.size() != length()) {
    throw StructuralError(
        fmt::format("appliance '{}': trace length {} != set length {}",
                    appliance.name, trace.size(), length()));
  }
  auto it = find_by_name(members_, appliance.name);
  if (it != members_.end() && it->appliance.name == appliance.name) {
    throw StructuralError(
        fmt::format("appliance '{}' already present", appliance.name));
  }
  members_.insert(it, Member{std::move(appliance), std::move(trace)});
}

std::size_t TraceSet::length() const {
  return members_.empty() ? 0 : members_.front().trace.size();
}

const TraceSet::Member* TraceSet::find(std::string_view name) const {
  auto it = find_by_name(members_, name);
  return it != members_.end() && it->appliance.name == name ? &*it : nullptr;
}

void StateMask::insert(ApplianceId appliance, StateRow states) {
  if (states.size() != length_) {
    throw StructuralError(
        fmt::format("appliance '{}': mask row length {} != mask length {}",
                    appliance.name, states.size(), length_));
  }
  auto it = find_by_name(rows_, appliance.name);
  if (it != rows_.end() && it->appliance.name == appliance.name) {
    throw StructuralError(
        fmt::format("appliance '{}' already present", appliance.name));
  }
  rows_.insert(it, Row{std::move(appliance), std::move(states)});
}

const StateMask::Row* StateMask::find(std::string_view name) const {
  auto it = find_by_name(rows_, name);
  return it != rows_.end() && it->appliance.name == name ? &*it : nullptr;
}

PowerTrace aggregate(const TraceSet& traces) {
  if (traces.empty()) throw StructuralError("cannot aggregate an empty set");
  const std::size_t n = traces.length();
  std::vector<double> sum(n, 0.0);
  bool partial = false;
  for (const auto& [appliance, trace] : traces.members()) {
    if (trace.size() != n) {
      throw StructuralError(fmt::format(
          "appliance '{}': length {} != {}", appliance.name, trace.size(), n));
    }
    const auto samples = trace.samples();
    for (std::size_t t = 0; t < n; ++t) sum[t] += samples[t];
    partial = partial || trace.partial();
  }
  return PowerTrace(traces.day(), std::move(sum), std::string(kAggregateOrigin),
                    partial);
}

StateRow threshold_label(const PowerTrace& trace, double on_threshold,
                         int min_on) {
  if (!(on_threshold > 0.0)) {
    throw std::invalid_argument("on_threshold must be > 0");
  }
  if (min_on < 1) throw std::invalid_argument("min_on must be >= 1");
  const std::size_t n = trace.size();
  StateRow row(n, false);
  std::size_t t = 0;
  while (t < n) {
    if (trace[t] <= on_threshold) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end < n && trace[end] > on_threshold) ++end;
    if (end - t >= static_cast<std::size_t>(min_on)) {
      std::fill(row.begin() + static_cast<std::ptrdiff_t>(t),
                row.begin() + static_cast<std::ptrdiff_t>(end), true);
    }
    t = end;
  }
  return row;
}

const LabelRule& LabelConfig::rule_for(std::string_view type_tag) const {
  auto it = by_type.find(type_tag);
  return it == by_type.end() ? defaults : it->second;
}

StateMask label_set(const TraceSet& traces, const LabelConfig& config) {
  StateMask mask(traces.day(), traces.length());
  for (const auto& [appliance, trace] : traces.members()) {
    if (!config.by_type.contains(appliance.type_tag)) {
      logger().info("appliance '{}' (type '{}'): no label rule, using defaults",
                    appliance.name, appliance.type_tag);
    }
    const LabelRule& rule = config.rule_for(appliance.type_tag);
    mask.insert(appliance, threshold_label(trace, rule.on_threshold, rule.min_on));
  }
  return mask;
}

}  // namespace nalm
