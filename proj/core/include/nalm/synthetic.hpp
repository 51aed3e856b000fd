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

#ifndef NALM_SYNTHETIC_HPP_
#define NALM_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/trace.hpp"
#include "nalm/usage.hpp"

namespace nalm {

/// A scheduled ON period, seconds [start, stop) of the day.
struct ScheduledUse {
  int start = 0;
  int stop = 0;
};

/// A recurring slot of the daily routine; between min_uses and max_uses
/// uses start and stop inside [earliest, latest).
struct UseWindow {
  int earliest = 0;
  int latest = kSecondsPerDay;
  int min_duration = 60;
  int max_duration = 600;
  int min_uses = 1;
  int max_uses = 1;
};

/// Power model and usage schedule of one simulated appliance.
struct SyntheticAppliance {
  ApplianceId id;
  double on_watts = 100.0;
  /// Gaussian noise on the ON level (standard deviation, watts).
  double on_noise = 0.0;
  /// Square-wave modulation added while ON: +cycle_watts for the first half
  /// of every cycle_period seconds.
  double cycle_watts = 0.0;
  int cycle_period = 0;
  /// OFF level and its noise; kept below the default 5 W ON threshold.
  double standby_watts = 0.0;
  double standby_noise = 0.0;
  std::vector<UseWindow> windows;
  /// Uses present on every generated day.
  std::vector<ScheduledUse> fixed;
};

struct Scenario {
  std::string name;
  std::vector<SyntheticAppliance> appliances;
  /// When set no two appliances are ever ON at the same time.
  bool exclusive = false;
  /// Minimum OFF time between scheduled uses that must not overlap.
  int min_separation = 300;
  Day train_day;
  Day test_day;
};

struct SyntheticDay {
  TraceSet traces;
  /// Generator ground truth; label_set() with the default rules
  /// reproduces it.
  StateMask truth;
};

/// Deterministic in (scenario, day, seed). Watt values are rounded to
/// 0.1 W so they survive a text round trip unchanged.
SyntheticDay generate_day(const Scenario& scenario, Day day, std::uint64_t seed);

/// Two appliances on disjoint power levels that never overlap: "Lamp"
/// (100 W) and "Kettle" (1000 W, always used 07:00-07:05).
Scenario separable_scenario();

/// Six duty-cycled appliances with overlapping power levels, named after
/// common household loads.
Scenario overlapping_scenario();

/// "separable" or "overlapping"; throws ConfigError otherwise.
Scenario scenario_by_name(std::string_view name);

}  // namespace nalm

#endif  // NALM_SYNTHETIC_HPP_
