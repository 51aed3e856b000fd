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

#ifndef NALM_BEHAVIOR_HPP_
#define NALM_BEHAVIOR_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/trace.hpp"
#include "nalm/usage.hpp"

namespace nalm {

/// Object graph describing what one user did in one home: the appliances
/// installed there and each usage, linked user -> appliance.
struct BehaviorModel {
  struct User {
    std::string name;
    friend bool operator==(const User&, const User&) = default;
  };
  struct Home {
    std::string id;
    friend bool operator==(const Home&, const Home&) = default;
  };
  struct Appliance {
    std::string name;
    std::string type;
    friend bool operator==(const Appliance&, const Appliance&) = default;
  };
  struct Usage {
    std::string appliance;
    int start = 0;  // seconds since midnight
    int stop = 0;   // exclusive, may be 86400
    friend bool operator==(const Usage&, const Usage&) = default;
  };
  /// User -> appliance edge carrying one usage.
  struct Dependency {
    std::string client;
    std::string supplier;
    std::size_t usage;
  };

  User user;
  Home home;
  std::optional<Day> day;
  /// Sorted by name.
  std::vector<Appliance> appliances;
  /// Sorted by (start, appliance, stop).
  std::vector<Usage> usages;

  const Appliance* find_appliance(std::string_view name) const;
  std::vector<Dependency> dependencies() const;

  /// Throws StructuralError on dangling appliance references, unsorted or
  /// duplicate entries, empty names, or out-of-range times.
  void validate() const;

  friend bool operator==(const BehaviorModel&, const BehaviorModel&) = default;
};

inline constexpr std::string_view kDefaultHomeId = "home";

/// Maps usage intervals onto a BehaviorModel. The appliance list is the
/// catalog (deduplicated, sorted); usages are sorted by start time, then
/// appliance name. The model day is taken from the usages when present.
/// Throws StructuralError when a usage names an appliance not in the
/// catalog.
BehaviorModel build_model(std::string user_name,
                          const std::vector<UsageInterval>& usages,
                          const std::vector<ApplianceId>& catalog,
                          std::string home_id = std::string(kDefaultHomeId));

/// XML interchange document:
///
///   <behavior format="nalm-behavior" version="1" [day="YYYY-MM-DD"]>
///     <home id="..."/>
///     <user name="..."/>
///     <appliance name="..." type="..."/>          (one per appliance)
///     <usage user="..." appliance="..." start="HH:MM:SS" stop="HH:MM:SS"/>
///   </behavior>
///
/// Elements are written in exactly this order, so the output is stable.
std::string serialize_model(const BehaviorModel& model);

/// Throws ParseError on malformed documents and StructuralError when the
/// decoded model is not valid.
BehaviorModel deserialize_model(std::string_view document);

}  // namespace nalm

#endif  // NALM_BEHAVIOR_HPP_
