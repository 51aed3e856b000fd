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

#include "nalm/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nalm/error.hpp"

namespace nalm {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint64_t parse_count(std::string_view field, std::size_t line_no) {
  field = trim(field);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("line {}: bad count '{}'", line_no, field));
  }
  return v;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

nlohmann::ordered_json row_json(std::string_view name, const ConfusionCounts& c) {
  const MetricSet m = metrics(c);
  nlohmann::ordered_json j;
  j["name"] = name;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  j["precision"] = m.precision;
  j["accuracy"] = m.accuracy;
  j["tpr"] = m.tpr;
  j["tnr"] = m.tnr;
  j["f1"] = m.f1;
  j["degenerate"] = m.degenerate;
  return j;
}

}  // namespace

MetricSet metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("metrics of all-zero counts");
  MetricSet m;
  m.precision = ratio(c.tp, c.tp + c.fp, m.degenerate);
  m.accuracy = ratio(c.tp + c.tn, c.total(), m.degenerate);
  m.tpr = ratio(c.tp, c.tp + c.fn, m.degenerate);
  m.tnr = ratio(c.tn, c.tn + c.fp, m.degenerate);
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, m.degenerate);
  return m;
}

void ConfusionTable::check_equal_totals() const {
  for (const auto& row : rows) {
    if (row.counts.total() != rows.front().counts.total()) {
      throw StructuralError(fmt::format(
          "appliance '{}' covers {} samples but '{}' covers {}", row.appliance,
          row.counts.total(), rows.front().appliance, rows.front().counts.total()));
    }
  }
}

ConfusionTable confusion(const StateMask& predicted, const StateMask& truth) {
  if (predicted.length() != truth.length()) {
    throw StructuralError(fmt::format("mask lengths differ: {} vs {}",
                                      predicted.length(), truth.length()));
  }
  if (predicted.size() != truth.size()) {
    throw StructuralError(fmt::format("masks hold {} and {} appliances",
                                      predicted.size(), truth.size()));
  }
  ConfusionTable table;
  for (const auto& [appliance, pred] : predicted.rows()) {
    const auto* expected = truth.find(appliance.name);
    if (expected == nullptr) {
      throw StructuralError(
          fmt::format("appliance '{}' missing from ground truth", appliance.name));
    }
    ConfusionCounts c;
    for (std::size_t t = 0; t < pred.size(); ++t) {
      const bool p = pred[t];
      const bool y = expected->states[t];
      c.tp += p && y;
      c.fp += p && !y;
      c.tn += !p && !y;
      c.fn += !p && y;
    }
    table.rows.push_back({appliance.name, c});
    table.overall += c;
  }
  table.check_equal_totals();
  return table;
}

ConfusionTable parse_counts_table(std::string_view text) {
  ConfusionTable table;
  bool have_overall = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    for (std::size_t pos = 0;;) {
      const auto comma = line.find(',', pos);
      fields.push_back(trim(line.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 5) {
      throw ParseError(fmt::format("line {}: expected name,tp,fp,tn,fn", line_no));
    }
    if (table.rows.empty() && !have_overall && iequals(fields[0], "name")) continue;
    ConfusionCounts c{parse_count(fields[1], line_no), parse_count(fields[2], line_no),
                      parse_count(fields[3], line_no), parse_count(fields[4], line_no)};
    if (iequals(fields[0], "overall")) {
      table.overall = c;
      have_overall = true;
    } else {
      table.rows.push_back({std::string(fields[0]), c});
    }
  }
  if (table.rows.empty()) throw ParseError("counts table has no appliance rows");
  if (!have_overall) {
    for (const auto& row : table.rows) table.overall += row.counts;
  }
  table.check_equal_totals();
  return table;
}

std::string format_metrics_table(const ConfusionTable& table) {
  std::size_t width = std::string_view("Overall").size();
  for (const auto& row : table.rows) width = std::max(width, row.appliance.size());
  std::string out = fmt::format("{:<{}}  {:>6} {:>6} {:>6} {:>6} {:>6}\n", "", width,
                                "Prec.", "Acc.", "TPR", "TNR", "F1");
  auto line = [&](std::string_view name, const ConfusionCounts& c) {
    const MetricSet m = metrics(c);
    fmt::format_to(std::back_inserter(out),
                   "{:<{}}  {:>6.3f} {:>6.3f} {:>6.3f} {:>6.3f} {:>6.3f}{}\n", name,
                   width, m.precision, m.accuracy, m.tpr, m.tnr, m.f1,
                   m.degenerate ? "  (degenerate)" : "");
  };
  for (const auto& row : table.rows) line(row.appliance, row.counts);
  line("Overall", table.overall);
  return out;
}

std::string metrics_to_json(const ConfusionTable& table) {
  nlohmann::ordered_json j;
  j["format"] = "nalm-metrics";
  j["version"] = 1;
  auto& rows = j["appliances"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) rows.push_back(row_json(row.appliance, row.counts));
  j["overall"] = row_json("Overall", table.overall);
  return j.dump(2) + "\n";
}

}  // namespace nalm
