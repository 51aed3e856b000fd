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

#ifndef NALM_INGEST_HPP_
#define NALM_INGEST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/trace.hpp"

namespace nalm {

struct RawSample {
  std::int64_t epoch_seconds;
  double watts;

  friend bool operator==(const RawSample&, const RawSample&) = default;
};

/// Parsed plug-meter file: rows sorted by time, one row per timestamp.
struct RawSampleFile {
  std::string source;
  std::vector<RawSample> rows;
  /// 1-based line numbers that failed to parse.
  std::vector<std::size_t> malformed_lines;
};

/// Parses trace text. Two line grammars are accepted and may be mixed:
///
///   DD/MM/YYYY HH:MM:SS;<watts>[;ignored...]   (Tracebase)
///   <epoch_seconds>,<watts>                    (synthetic data)
///
/// Blank lines are skipped; LF and CRLF endings are both fine. Negative or
/// non-finite watt values count as malformed. Duplicate timestamps keep the
/// last value in file order. Throws ParseError listing line numbers when
/// more than 10% of the non-blank lines are malformed.
RawSampleFile parse_trace_file(std::string_view text,
                               std::string source = {});

/// Reads and parses a file from disk.
RawSampleFile read_trace_file(const std::string& path);

/// Tracebase-grammar rendering; parse_trace_file() of the result yields the
/// same rows.
std::string serialize_trace_file(const RawSampleFile& file);

inline constexpr int kDefaultGapFill = 10;

/// Resamples one day of `raw` (the day of its first row unless `day` is
/// given) onto the 1 Hz grid.
///
/// Each second takes the value of the latest row at or before it if that
/// row is at most `gap_fill` seconds old, and 0 W otherwise. The trace runs
/// from midnight to the last row; when forward fill from the last row
/// reaches midnight the trace is a full 86400-sample day. The result is
/// flagged partial when it is shorter than a day or the first row comes
/// more than `gap_fill` seconds after midnight.
///
/// Throws ParseError when there are no rows for the day and
/// std::invalid_argument when gap_fill < 0.
PowerTrace resample_to_1hz(const RawSampleFile& raw, int gap_fill,
                           std::optional<Day> day = std::nullopt);

struct ApplianceFile {
  ApplianceId appliance;
  RawSampleFile file;
};

struct DayConfig {
  /// Appliances that must be present. Empty means "whatever was given".
  std::vector<ApplianceId> expected;
  int gap_fill = kDefaultGapFill;
};

/// Builds the full-day TraceSet for `day`. Short traces are zero-padded to
/// 86400 samples and stay flagged partial.
///
/// Throws StructuralError when expected appliances are missing (all absent
/// names are listed) or a file holds no samples for `day`.
TraceSet build_day(const std::vector<ApplianceFile>& files, Day day,
                   const DayConfig& config);

}  // namespace nalm

#endif  // NALM_INGEST_HPP_
