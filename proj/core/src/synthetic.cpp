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

#include "nalm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "nalm/error.hpp"
#include "nalm/random.hpp"

namespace nalm {
namespace {

constexpr int kHour = 3600;
constexpr int kMinute = 60;

Day make_day(int y, unsigned m, unsigned d) {
  return Day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

double round_tenth(double w) { return std::round(w * 10.0) / 10.0; }

bool conflicts(const std::vector<ScheduledUse>& uses, ScheduledUse candidate, int separation) {
  return std::any_of(uses.begin(), uses.end(), [&](const ScheduledUse& u) {
    return candidate.start < u.stop + separation && u.start < candidate.stop + separation;
  });
}

int draw_between(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

SyntheticDay generate_day(const Scenario& scenario, Day day, std::uint64_t seed) {
  const std::uint64_t day_seed =
      derive_seed(seed, static_cast<std::uint64_t>(day_start_epoch(day)));
  const std::size_t count = scenario.appliances.size();

  // Schedules first, so exclusivity can look at every appliance.
  std::vector<std::vector<ScheduledUse>> schedules(count);
  std::vector<ScheduledUse> everything;
  for (std::size_t a = 0; a < count; ++a) {
    for (const auto& use : scenario.appliances[a].fixed) {
      schedules[a].push_back(use);
      everything.push_back(use);
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    const auto& spec = scenario.appliances[a];
    std::mt19937_64 rng(derive_seed(day_seed, 2 * a));
    for (const auto& window : spec.windows) {
      const int uses = draw_between(rng, window.min_uses, window.max_uses);
      for (int k = 0; k < uses; ++k) {
        for (int attempt = 0; attempt < 200; ++attempt) {
          const int duration = draw_between(rng, window.min_duration, window.max_duration);
          if (window.latest - window.earliest <= duration) break;
          const int start = draw_between(rng, window.earliest, window.latest - duration - 1);
          const ScheduledUse candidate{start, start + duration};
          const auto& others = scenario.exclusive ? everything : schedules[a];
          if (conflicts(others, candidate, scenario.min_separation)) continue;
          schedules[a].push_back(candidate);
          everything.push_back(candidate);
          break;
        }
      }
    }
    std::sort(schedules[a].begin(), schedules[a].end(),
              [](const auto& x, const auto& y) { return x.start < y.start; });
  }

  SyntheticDay out{TraceSet(day), StateMask(day, kSecondsPerDay)};
  for (std::size_t a = 0; a < count; ++a) {
    const auto& spec = scenario.appliances[a];
    std::mt19937_64 rng(derive_seed(day_seed, 2 * a + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateRow on(kSecondsPerDay, false);
    for (const auto& use : schedules[a]) {
      for (int s = use.start; s < use.stop; ++s) on[static_cast<std::size_t>(s)] = true;
    }
    std::vector<double> watts(kSecondsPerDay);
    for (int s = 0; s < kSecondsPerDay; ++s) {
      const double noise = gauss(rng);
      double w;
      if (on[static_cast<std::size_t>(s)]) {
        w = spec.on_watts + spec.on_noise * noise;
        if (spec.cycle_period > 0 && (s % spec.cycle_period) < spec.cycle_period / 2) {
          w += spec.cycle_watts;
        }
        w = std::max(w, 6.0);
      } else {
        w = std::clamp(spec.standby_watts + spec.standby_noise * noise, 0.0, 4.5);
      }
      watts[static_cast<std::size_t>(s)] = round_tenth(w);
    }
    out.traces.insert(spec.id, PowerTrace(day, std::move(watts), spec.id.name));
    out.truth.insert(spec.id, std::move(on));
  }
  return out;
}

Scenario separable_scenario() {
  Scenario s;
  s.name = "separable";
  s.exclusive = true;
  s.min_separation = 10 * kMinute;
  s.train_day = make_day(2024, 1, 1);
  s.test_day = make_day(2024, 1, 2);

  SyntheticAppliance lamp;
  lamp.id = {"Lamp", "lamp"};
  lamp.on_watts = 100.0;
  lamp.windows = {{5 * kHour, 24 * kHour - kMinute, 10 * kMinute, 90 * kMinute, 4, 6}};

  SyntheticAppliance kettle;
  kettle.id = {"Kettle", "kettle"};
  kettle.on_watts = 1000.0;
  kettle.windows = {{8 * kHour, 23 * kHour, 2 * kMinute, 6 * kMinute, 8, 12}};
  kettle.fixed = {{7 * kHour, 7 * kHour + 5 * kMinute}};

  s.appliances = {kettle, lamp};
  return s;
}

Scenario overlapping_scenario() {
  Scenario s;
  s.name = "overlapping";
  s.exclusive = false;
  s.min_separation = 5 * kMinute;
  s.train_day = make_day(2024, 1, 1);
  s.test_day = make_day(2024, 1, 2);

  auto appliance = [](std::string name, std::string type, double on, double noise,
                      std::vector<UseWindow> windows) {
    SyntheticAppliance a;
    a.id = {std::move(name), std::move(type)};
    a.on_watts = on;
    a.on_noise = noise;
    a.standby_watts = 1.0;
    a.standby_noise = 0.3;
    a.windows = std::move(windows);
    return a;
  };

  // Household routine: breakfast, office hours, lunch break, evening.
  auto stove = appliance("Cooking-stove", "stove", 1200.0, 40.0,
                         {{6 * kHour + 30 * kMinute, 8 * kHour, 8 * kMinute, 20 * kMinute},
                          {17 * kHour + 30 * kMinute, 19 * kHour + 30 * kMinute,
                           20 * kMinute, 45 * kMinute}});
  auto lamp = appliance("Lamp", "lamp", 60.0, 0.5,
                        {{6 * kHour, 8 * kHour + 30 * kMinute, 45 * kMinute, 2 * kHour},
                         {17 * kHour, 24 * kHour - kMinute, 3 * kHour, 6 * kHour}});
  auto pc = appliance("PC-Desktop", "computer", 95.0, 6.0,
                      {{8 * kHour + 30 * kMinute, 12 * kHour, 2 * kHour, 3 * kHour},
                       {13 * kHour, 17 * kHour + 30 * kMinute, 2 * kHour, 4 * kHour}});
  pc.cycle_watts = 30.0;
  pc.cycle_period = 300;
  auto monitor = appliance("Monitor-TFT", "monitor", 28.0, 1.0,
                           {{8 * kHour + 30 * kMinute, 12 * kHour, 90 * kMinute, 3 * kHour},
                            {13 * kHour, 17 * kHour + 30 * kMinute, 2 * kHour, 4 * kHour}});
  auto tv_crt = appliance("TV-CRT", "tv", 110.0, 3.0,
                          {{12 * kHour, 13 * kHour + 30 * kMinute, 30 * kMinute, 75 * kMinute},
                           {20 * kHour, 23 * kHour, 30 * kMinute, 90 * kMinute}});
  auto tv_lcd = appliance("TV-LCD", "tv", 75.0, 2.0,
                          {{18 * kHour + 30 * kMinute, 24 * kHour - kMinute, 90 * kMinute,
                            4 * kHour}});

  s.appliances = {stove, lamp, monitor, pc, tv_crt, tv_lcd};
  return s;
}

Scenario scenario_by_name(std::string_view name) {
  if (name == "separable") return separable_scenario();
  if (name == "overlapping") return overlapping_scenario();
  throw ConfigError(fmt::format("unknown scenario '{}' (separable|overlapping)", name));
}

}  // namespace nalm
