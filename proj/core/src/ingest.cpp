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

#include "nalm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "nalm/error.hpp"
#include "nalm/log.hpp"

namespace nalm {
namespace {

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) return false;
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

bool parse_watts(std::string_view text, double& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out) && out >= 0.0;
}

// DD/MM/YYYY HH:MM:SS
bool parse_tracebase_time(std::string_view text, std::int64_t& out) {
  if (text.size() != 19 || text[2] != '/' || text[5] != '/' ||
      text[10] != ' ' || text[13] != ':' || text[16] != ':') {
    return false;
  }
  int d, mo, y, h, mi, s;
  if (!parse_digits(text.substr(0, 2), d) ||
      !parse_digits(text.substr(3, 2), mo) ||
      !parse_digits(text.substr(6, 4), y) ||
      !parse_digits(text.substr(11, 2), h) ||
      !parse_digits(text.substr(14, 2), mi) ||
      !parse_digits(text.substr(17, 2), s)) {
    return false;
  }
  const Day day{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                std::chrono::day{static_cast<unsigned>(d)}};
  if (!day.ok() || h > 23 || mi > 59 || s > 59) return false;
  out = day_start_epoch(day) + h * 3600 + mi * 60 + s;
  return true;
}

bool parse_line(std::string_view line, RawSample& out) {
  if (auto semi = line.find(';'); semi != std::string_view::npos) {
    auto rest = line.substr(semi + 1);
    rest = rest.substr(0, rest.find(';'));
    return parse_tracebase_time(line.substr(0, semi), out.epoch_seconds) &&
           parse_watts(rest, out.watts);
  }
  auto comma = line.find(',');
  if (comma == std::string_view::npos) return false;
  auto epoch = line.substr(0, comma);
  const auto* end = epoch.data() + epoch.size();
  auto [ptr, ec] = std::from_chars(epoch.data(), end, out.epoch_seconds);
  return ec == std::errc{} && ptr == end &&
         parse_watts(line.substr(comma + 1), out.watts);
}

}  // namespace

RawSampleFile parse_trace_file(std::string_view text, std::string source) {
  RawSampleFile result{std::move(source), {}, {}};
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    ++non_blank;
    RawSample sample{};
    if (parse_line(line, sample)) {
      result.rows.push_back(sample);
    } else {
      result.malformed_lines.push_back(line_no);
    }
  }

  if (result.malformed_lines.size() * 10 > non_blank) {
    std::string listed;
    const std::size_t shown = std::min<std::size_t>(result.malformed_lines.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      listed += fmt::format("{}{}", i ? "," : "", result.malformed_lines[i]);
    }
    if (shown < result.malformed_lines.size()) listed += ",...";
    throw ParseError(fmt::format(
        "{}: {} of {} lines malformed (more than 10%), lines {}",
        result.source.empty() ? "<input>" : result.source,
        result.malformed_lines.size(), non_blank, listed));
  }
  if (!result.malformed_lines.empty()) {
    logger().warn("{}: skipped {} malformed lines", result.source,
                  result.malformed_lines.size());
  }

  auto& rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.epoch_seconds < b.epoch_seconds;
  });
  // Last-wins: keep the final row of every equal-timestamp run.
  std::vector<RawSample> unique;
  unique.reserve(rows.size());
  for (const auto& row : rows) {
    if (!unique.empty() && unique.back().epoch_seconds == row.epoch_seconds) {
      unique.back() = row;
    } else {
      unique.push_back(row);
    }
  }
  rows = std::move(unique);
  return result;
}

RawSampleFile read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trace_file(buffer.str(), path);
}

std::string serialize_trace_file(const RawSampleFile& file) {
  std::string out;
  out.reserve(file.rows.size() * 28);
  for (const auto& row : file.rows) {
    const Day day = day_of_epoch(row.epoch_seconds);
    const auto sec = row.epoch_seconds - day_start_epoch(day);
    fmt::format_to(std::back_inserter(out), "{:02}/{:02}/{:04} {};{}\n",
                   static_cast<unsigned>(day.day()),
                   static_cast<unsigned>(day.month()),
                   static_cast<int>(day.year()),
                   format_hhmmss(static_cast<int>(sec)), row.watts);
  }
  return out;
}

PowerTrace resample_to_1hz(const RawSampleFile& raw, int gap_fill,
                           std::optional<Day> day) {
  if (gap_fill < 0) throw std::invalid_argument("gap_fill must be >= 0");
  if (raw.rows.empty()) {
    throw ParseError(fmt::format("{}: no samples to resample", raw.source));
  }
  const Day target = day.value_or(day_of_epoch(raw.rows.front().epoch_seconds));
  const std::int64_t start = day_start_epoch(target);
  const auto first = std::lower_bound(
      raw.rows.begin(), raw.rows.end(), start,
      [](const RawSample& r, std::int64_t t) { return r.epoch_seconds < t; });
  const auto last = std::lower_bound(
      first, raw.rows.end(), start + kSecondsPerDay,
      [](const RawSample& r, std::int64_t t) { return r.epoch_seconds < t; });
  if (first == last) {
    throw ParseError(fmt::format("{}: no samples on {}", raw.source,
                                 format_day(target)));
  }

  const auto first_second = static_cast<int>(first->epoch_seconds - start);
  const auto last_second = static_cast<int>((last - 1)->epoch_seconds - start);
  const int length = last_second + gap_fill >= kSecondsPerDay - 1
                         ? kSecondsPerDay
                         : last_second + 1;

  std::vector<double> samples(static_cast<std::size_t>(length), 0.0);
  auto row = first;
  for (int s = 0; s < length; ++s) {
    while (std::next(row) != last && std::next(row)->epoch_seconds - start <= s) {
      ++row;
    }
    const auto row_second = row->epoch_seconds - start;
    if (row_second <= s && s - row_second <= gap_fill) {
      samples[static_cast<std::size_t>(s)] = row->watts;
    }
  }
  const bool partial = length < kSecondsPerDay || first_second > gap_fill;
  return PowerTrace(target, std::move(samples), raw.source, partial);
}

TraceSet build_day(const std::vector<ApplianceFile>& files, Day day,
                   const DayConfig& config) {
  std::vector<std::string> missing;
  for (const auto& want : config.expected) {
    const bool found = std::any_of(files.begin(), files.end(), [&](const auto& f) {
      return f.appliance.name == want.name;
    });
    if (!found) missing.push_back(want.name);
  }
  if (!missing.empty()) {
    throw StructuralError(fmt::format("missing appliance files for {}: {}",
                                      format_day(day), fmt::join(missing, ", ")));
  }

  TraceSet set(day);
  for (const auto& [appliance, raw] : files) {
    PowerTrace trace = [&] {
      try {
        return resample_to_1hz(raw, config.gap_fill, day);
      } catch (const ParseError& e) {
        throw StructuralError(
            fmt::format("appliance '{}': {}", appliance.name, e.what()));
      }
    }();
    if (trace.size() < static_cast<std::size_t>(kSecondsPerDay)) {
      std::vector<double> padded(trace.samples().begin(), trace.samples().end());
      padded.resize(kSecondsPerDay, 0.0);
      trace = PowerTrace(day, std::move(padded), appliance.name, true);
    } else {
      trace = PowerTrace(day, {trace.samples().begin(), trace.samples().end()},
                         appliance.name, trace.partial());
    }
    if (trace.partial()) {
      logger().warn("appliance '{}' does not cover all of {}", appliance.name,
                    format_day(day));
    }
    set.insert(appliance, std::move(trace));
  }
  return set;
}

}  // namespace nalm
