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

#include "nalm/report.hpp"

#include <map>
#include <optional>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nalm/error.hpp"

namespace nalm {
namespace {

using Slots = std::map<std::string, std::optional<std::string>, std::less<>>;

// Expands `{name}` slots. A slot present with no value, or absent from
// `slots` altogether, is unresolvable.
std::string expand(std::string_view pattern, const Slots& slots,
                   std::string_view pattern_name) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    if (c == '}' ) {
      if (i + 1 < pattern.size() && pattern[i + 1] == '}') {
        out.push_back('}');
        ++i;
        continue;
      }
      throw TemplateError(fmt::format("{} pattern: stray '}}'", pattern_name));
    }
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    if (i + 1 < pattern.size() && pattern[i + 1] == '{') {
      out.push_back('{');
      ++i;
      continue;
    }
    const auto close = pattern.find('}', i + 1);
    if (close == std::string_view::npos) {
      throw TemplateError(fmt::format("{} pattern: unterminated slot", pattern_name));
    }
    const auto name = pattern.substr(i + 1, close - i - 1);
    const auto it = slots.find(name);
    if (it == slots.end()) {
      throw TemplateError(fmt::format("{} pattern: unknown slot '{}'", pattern_name, name));
    }
    if (!it->second) {
      throw TemplateError(fmt::format("{} pattern: slot '{}' has no value", pattern_name, name));
    }
    out += *it->second;
    i = close;
  }
  return out;
}

Slots model_slots(const BehaviorModel& model) {
  Slots slots;
  slots["user"] = model.user.name;
  slots["home"] = model.home.id;
  slots["day"] = model.day ? std::optional(format_day(*model.day)) : std::nullopt;
  return slots;
}

}  // namespace

ReportTemplate ReportTemplate::builtin(std::string_view name) {
  ReportTemplate t;
  if (name == "default") return t;
  if (name == "per-appliance") {
    t.grouping = Grouping::kPerAppliance;
    t.sentence = "{user} was using the {appliance} {ranges}.";
    return t;
  }
  if (name == "daily-summary") {
    t.header = "Activity of {user} on {day}:";
    t.sentence = "- {appliance} from {start} to {stop}";
    t.empty = "No appliance usage detected.";
    return t;
  }
  throw TemplateError(fmt::format(
      "unknown template '{}' (default|per-appliance|daily-summary)", name));
}

ReportTemplate ReportTemplate::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TemplateError(fmt::format("template JSON: {}", e.what()));
  }
  if (!j.is_object()) throw TemplateError("template JSON must be an object");
  ReportTemplate t;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      throw TemplateError(fmt::format("template key '{}' must be a string", key));
    }
    const auto s = value.get<std::string>();
    if (key == "grouping") {
      if (s == "per-usage") {
        t.grouping = Grouping::kPerUsage;
      } else if (s == "per-appliance") {
        t.grouping = Grouping::kPerAppliance;
      } else {
        throw TemplateError(fmt::format("unknown grouping '{}'", s));
      }
    } else if (key == "sentence") {
      t.sentence = s;
    } else if (key == "range") {
      t.range = s;
    } else if (key == "range_separator") {
      t.range_separator = s;
    } else if (key == "range_last_separator") {
      t.range_last_separator = s;
    } else if (key == "header") {
      t.header = s;
    } else if (key == "empty") {
      t.empty = s;
    } else {
      throw TemplateError(fmt::format("unknown template key '{}'", key));
    }
  }
  return t;
}

std::string render_report(const BehaviorModel& model, const ReportTemplate& tpl) {
  model.validate();
  const Slots base = model_slots(model);
  const bool grouped = tpl.grouping == ReportTemplate::Grouping::kPerAppliance;

  // Check every pattern against its slot set up front so a broken template
  // fails even when there is nothing to report.
  Slots sentence_probe = base;
  sentence_probe["appliance"] = sentence_probe["type"] = "";
  if (grouped) {
    sentence_probe["ranges"] = "";
  } else {
    sentence_probe["start"] = sentence_probe["stop"] = "";
  }
  auto probe = [](Slots slots) {
    for (auto& [_, v] : slots) v = "";
    return slots;
  };
  expand(tpl.sentence, probe(sentence_probe), "sentence");
  if (grouped) expand(tpl.range, {{"start", ""}, {"stop", ""}}, "range");
  expand(tpl.empty, probe(base), "empty");
  expand(tpl.header, probe(base), "header");

  std::string out;
  if (!tpl.header.empty()) out += expand(tpl.header, base, "header") + "\n";
  if (model.usages.empty()) return out + expand(tpl.empty, base, "empty") + "\n";

  auto appliance_slots = [&](const std::string& name) {
    Slots slots = base;
    slots["appliance"] = name;
    slots["type"] = model.find_appliance(name)->type;
    return slots;
  };

  if (!grouped) {
    for (const auto& u : model.usages) {
      Slots slots = appliance_slots(u.appliance);
      slots["start"] = format_hhmm(u.start);
      slots["stop"] = format_hhmm(u.stop);
      out += expand(tpl.sentence, slots, "sentence") + "\n";
    }
    return out;
  }

  // Appliances in order of their first usage.
  std::vector<std::string> order;
  for (const auto& u : model.usages) {
    if (std::find(order.begin(), order.end(), u.appliance) == order.end()) {
      order.push_back(u.appliance);
    }
  }
  for (const auto& name : order) {
    std::vector<std::string> ranges;
    for (const auto& u : model.usages) {
      if (u.appliance != name) continue;
      ranges.push_back(expand(tpl.range,
                              {{"start", format_hhmm(u.start)}, {"stop", format_hhmm(u.stop)}},
                              "range"));
    }
    std::string joined;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (i > 0) {
        joined += i + 1 == ranges.size() ? tpl.range_last_separator : tpl.range_separator;
      }
      joined += ranges[i];
    }
    Slots slots = appliance_slots(name);
    slots["ranges"] = joined;
    out += expand(tpl.sentence, slots, "sentence") + "\n";
  }
  return out;
}

}  // namespace nalm
