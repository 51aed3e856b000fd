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

#include "nalm/behavior.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "nalm/error.hpp"

namespace nalm {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kFormat = "nalm-behavior";
constexpr int kVersion = 1;

bool usage_less(const BehaviorModel::Usage& a, const BehaviorModel::Usage& b) {
  return std::tie(a.start, a.appliance, a.stop) < std::tie(b.start, b.appliance, b.stop);
}

std::string attribute(const pt::ptree& node, std::string_view element,
                      const char* name) {
  const auto value = node.get_optional<std::string>(fmt::format("<xmlattr>.{}", name));
  if (!value) {
    throw ParseError(fmt::format("<{}> lacks attribute '{}'", element, name));
  }
  return *value;
}

}  // namespace

const BehaviorModel::Appliance* BehaviorModel::find_appliance(
    std::string_view name) const {
  auto it = std::lower_bound(
      appliances.begin(), appliances.end(), name,
      [](const Appliance& a, std::string_view key) { return a.name < key; });
  return it != appliances.end() && it->name == name ? &*it : nullptr;
}

std::vector<BehaviorModel::Dependency> BehaviorModel::dependencies() const {
  std::vector<Dependency> edges;
  edges.reserve(usages.size());
  for (std::size_t i = 0; i < usages.size(); ++i) {
    edges.push_back({user.name, usages[i].appliance, i});
  }
  return edges;
}

void BehaviorModel::validate() const {
  if (user.name.empty()) throw StructuralError("behavior model has no user name");
  for (std::size_t i = 0; i < appliances.size(); ++i) {
    if (appliances[i].name.empty()) throw StructuralError("appliance without a name");
    if (i > 0 && appliances[i - 1].name >= appliances[i].name) {
      throw StructuralError("appliances must be unique and sorted by name");
    }
  }
  for (std::size_t i = 0; i < usages.size(); ++i) {
    const auto& u = usages[i];
    if (find_appliance(u.appliance) == nullptr) {
      throw StructuralError(
          fmt::format("usage references undeclared appliance '{}'", u.appliance));
    }
    if (u.start < 0 || u.stop > kSecondsPerDay || u.start >= u.stop) {
      throw StructuralError(fmt::format("usage of '{}' has invalid range [{}, {})",
                                        u.appliance, u.start, u.stop));
    }
    if (i > 0 && usage_less(u, usages[i - 1])) {
      throw StructuralError("usages must be sorted by start time");
    }
  }
}

BehaviorModel build_model(std::string user_name,
                          const std::vector<UsageInterval>& usages,
                          const std::vector<ApplianceId>& catalog,
                          std::string home_id) {
  BehaviorModel model;
  model.user.name = std::move(user_name);
  model.home.id = std::move(home_id);
  for (const auto& id : catalog) model.appliances.push_back({id.name, id.type_tag});
  std::sort(model.appliances.begin(), model.appliances.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  model.appliances.erase(
      std::unique(model.appliances.begin(), model.appliances.end(),
                  [](const auto& a, const auto& b) { return a.name == b.name; }),
      model.appliances.end());

  for (const auto& u : usages) {
    if (model.find_appliance(u.appliance.name) == nullptr) {
      throw StructuralError(
          fmt::format("usage references unknown appliance '{}'", u.appliance.name));
    }
    if (model.day && *model.day != u.day) {
      throw StructuralError("usages span more than one day");
    }
    model.day = u.day;
    model.usages.push_back({u.appliance.name, u.start, u.stop});
  }
  std::sort(model.usages.begin(), model.usages.end(), usage_less);
  model.validate();
  return model;
}

std::string serialize_model(const BehaviorModel& model) {
  model.validate();
  pt::ptree root;
  auto& behavior = root.add_child("behavior", pt::ptree{});
  behavior.put("<xmlattr>.format", std::string(kFormat));
  behavior.put("<xmlattr>.version", kVersion);
  if (model.day) behavior.put("<xmlattr>.day", format_day(*model.day));
  behavior.add_child("home", pt::ptree{}).put("<xmlattr>.id", model.home.id);
  behavior.add_child("user", pt::ptree{}).put("<xmlattr>.name", model.user.name);
  for (const auto& a : model.appliances) {
    auto& node = behavior.add_child("appliance", pt::ptree{});
    node.put("<xmlattr>.name", a.name);
    node.put("<xmlattr>.type", a.type);
  }
  for (const auto& u : model.usages) {
    auto& node = behavior.add_child("usage", pt::ptree{});
    node.put("<xmlattr>.user", model.user.name);
    node.put("<xmlattr>.appliance", u.appliance);
    node.put("<xmlattr>.start", format_hhmmss(u.start));
    node.put("<xmlattr>.stop", format_hhmmss(u.stop));
  }
  std::ostringstream out;
  pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

BehaviorModel deserialize_model(std::string_view document) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, root, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(fmt::format("behavior document: {}", e.what()));
  }
  const auto behavior = root.get_child_optional("behavior");
  if (!behavior || root.size() != 1) {
    throw ParseError("behavior document must have a single <behavior> root");
  }
  if (attribute(*behavior, "behavior", "format") != kFormat) {
    throw ParseError("not a nalm-behavior document");
  }
  if (attribute(*behavior, "behavior", "version") != std::to_string(kVersion)) {
    throw ParseError("unsupported behavior document version");
  }

  BehaviorModel model;
  if (auto day = behavior->get_optional<std::string>("<xmlattr>.day")) {
    model.day = parse_day(*day);
  }
  bool have_home = false;
  bool have_user = false;
  for (const auto& [tag, node] : *behavior) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "home") {
      if (have_home) throw ParseError("more than one <home>");
      model.home.id = attribute(node, tag, "id");
      have_home = true;
    } else if (tag == "user") {
      if (have_user) throw ParseError("more than one <user> (single-user models only)");
      model.user.name = attribute(node, tag, "name");
      have_user = true;
    } else if (tag == "appliance") {
      model.appliances.push_back({attribute(node, tag, "name"), attribute(node, tag, "type")});
    } else if (tag == "usage") {
      if (attribute(node, tag, "user") != model.user.name) {
        throw ParseError("usage refers to a user other than the model's user");
      }
      model.usages.push_back({attribute(node, tag, "appliance"),
                              parse_hhmmss(attribute(node, tag, "start")),
                              parse_hhmmss(attribute(node, tag, "stop"))});
    } else {
      throw ParseError(fmt::format("unexpected element <{}>", tag));
    }
  }
  if (!have_home || !have_user) throw ParseError("behavior document lacks <home> or <user>");
  model.validate();
  return model;
}

}  // namespace nalm
