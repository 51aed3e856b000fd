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

#ifndef NALM_TRACE_HPP_
#define NALM_TRACE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nalm {

inline constexpr int kSecondsPerDay = 86400;

/// Calendar date that identifies one trace day.
using Day = std::chrono::year_month_day;

/// Parses `YYYY-MM-DD`. Throws ParseError on anything else.
Day parse_day(std::string_view text);
std::string format_day(Day day);

/// Seconds since the Unix epoch at 00:00:00 of `day` (civil time, no zone).
std::int64_t day_start_epoch(Day day);
/// Day containing the given epoch second.
Day day_of_epoch(std::int64_t epoch_seconds);

/// A second within a day.
class Timestamp {
 public:
  /// Throws std::out_of_range unless 0 <= seconds < 86400.
  Timestamp(Day day, int seconds_since_day_start);

  Day day() const { return day_; }
  int seconds() const { return seconds_; }

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

 private:
  Day day_;
  int seconds_;
};

/// `HH:MM` for a second of the day, truncated to the minute. 86400 renders
/// as `24:00`.
std::string format_hhmm(int seconds_since_day_start);
/// `HH:MM:SS`; 86400 renders as `24:00:00`.
std::string format_hhmmss(int seconds_since_day_start);
/// Inverse of format_hhmmss; accepts 00:00:00 through 24:00:00.
int parse_hhmmss(std::string_view text);

struct ApplianceId {
  std::string name;
  std::string type_tag;

  friend bool operator==(const ApplianceId&, const ApplianceId&) = default;
};

/// Token used as the origin of aggregate (virtual smart-meter) traces.
inline constexpr std::string_view kAggregateOrigin = "AGGREGATE";

/// Uniform 1 Hz series of average power in watts.
///
/// Full traces hold exactly 86400 samples. Anything else must be constructed
/// with `partial = true`; partial traces are rejected by training.
class PowerTrace {
 public:
  /// Throws std::invalid_argument on negative or non-finite samples and
  /// StructuralError when a non-partial trace is not 86400 samples long.
  PowerTrace(Day day, std::vector<double> samples, std::string origin,
             bool partial = false);

  Day day() const { return day_; }
  const std::string& origin() const { return origin_; }
  bool partial() const { return partial_; }
  bool is_aggregate() const { return origin_ == kAggregateOrigin; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t t) const { return samples_[t]; }

  friend bool operator==(const PowerTrace&, const PowerTrace&) = default;

 private:
  Day day_;
  std::vector<double> samples_;
  std::string origin_;
  bool partial_;
};

/// Per-appliance traces of one day. Members are kept ordered by appliance
/// name, so iteration order does not depend on insertion order.
class TraceSet {
 public:
  struct Member {
    ApplianceId appliance;
    PowerTrace trace;

    friend bool operator==(const Member&, const Member&) = default;
  };

  explicit TraceSet(Day day) : day_(day) {}

  /// Throws StructuralError naming the appliance when its day or length
  /// disagrees with the members already present, or when the name is taken.
  void insert(ApplianceId appliance, PowerTrace trace);

  Day day() const { return day_; }
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  /// Sample count shared by all members; 0 when empty.
  std::size_t length() const;
  const std::vector<Member>& members() const { return members_; }
  const Member* find(std::string_view name) const;

  friend bool operator==(const TraceSet&, const TraceSet&) = default;

 private:
  Day day_;
  std::vector<Member> members_;
};

using StateRow = std::vector<bool>;

/// Per-appliance, per-second ON/OFF matrix. Rows are ordered by appliance
/// name and share one length.
class StateMask {
 public:
  struct Row {
    ApplianceId appliance;
    StateRow states;

    friend bool operator==(const Row&, const Row&) = default;
  };

  StateMask(Day day, std::size_t length) : day_(day), length_(length) {}

  /// Throws StructuralError on a length mismatch or duplicate name.
  void insert(ApplianceId appliance, StateRow states);

  Day day() const { return day_; }
  std::size_t length() const { return length_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Row>& rows() const { return rows_; }
  const Row* find(std::string_view name) const;

  friend bool operator==(const StateMask&, const StateMask&) = default;

 private:
  Day day_;
  std::size_t length_;
  std::vector<Row> rows_;
};

/// Virtual smart-meter signal: per-second sum over every appliance.
/// The result is partial if any member is.
PowerTrace aggregate(const TraceSet& traces);

/// ON iff the sample exceeds `on_threshold` and lies in a maximal
/// above-threshold run of at least `min_on` seconds.
/// Throws std::invalid_argument unless on_threshold > 0 and min_on >= 1.
StateRow threshold_label(const PowerTrace& trace, double on_threshold,
                         int min_on);

struct LabelRule {
  double on_threshold = 5.0;
  int min_on = 30;
};

struct LabelConfig {
  LabelRule defaults;
  /// Overrides keyed by appliance type tag.
  std::map<std::string, LabelRule, std::less<>> by_type;

  const LabelRule& rule_for(std::string_view type_tag) const;
};

/// Ground-truth labels for every member of `traces`. Appliance types with no
/// rule fall back to the defaults (a warning is logged).
StateMask label_set(const TraceSet& traces, const LabelConfig& config);

}  // namespace nalm

#endif  // NALM_TRACE_HPP_
