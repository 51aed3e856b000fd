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

#ifndef NALM_TESTS_SUPPORT_TESTING_HPP_
#define NALM_TESTS_SUPPORT_TESTING_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nalm/evaluation.hpp"
#include "nalm/ingest.hpp"
#include "nalm/trace.hpp"

namespace nalm::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(std::string_view name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv[0] with the given arguments and waits for it. Exit code is -1
/// when the process died from a signal.
CommandResult run_command(const std::vector<std::string>& argv);

Day day(int y, unsigned m, unsigned d);
inline Day default_day() { return day(2024, 1, 1); }

/// Partial trace of arbitrary length (full when 86400 samples).
PowerTrace trace_of(std::vector<double> samples, std::string origin = "T");

std::vector<double> random_watts(std::mt19937_64& rng, std::size_t n, double max_watts);
StateRow random_row(std::mt19937_64& rng, std::size_t n, double p_on);
/// Row with runs of random length, so debounce thresholds actually bite.
StateRow random_runs(std::mt19937_64& rng, std::size_t n, int max_run);

// Independent reference implementations. Kept deliberately naive.
namespace oracle {

double sum_at(const TraceSet& traces, std::size_t t);

/// ON iff above threshold inside an above-threshold run of >= min_on.
StateRow label_scan(std::span<const double> samples, double threshold, int min_on);

/// [start, stop) of every maximal ON run.
std::vector<std::pair<int, int>> runs(const StateRow& row);

/// Gap fill then short-run removal, each as its own pass over runs().
StateRow debounce(const StateRow& row, int min_gap, int min_len);

/// Value at each second of `length` replayed from raw rows sorted by time.
std::vector<double> replay(const std::vector<RawSample>& rows, std::int64_t day_start,
                           std::size_t length, int gap_fill);

ConfusionCounts count(const StateRow& predicted, const StateRow& truth);

}  // namespace oracle

/// Reference per-appliance counts with their metrics to three decimals.
struct ReferenceRow {
  const char* name;
  std::uint64_t tp, fp, tn, fn;
  double precision, accuracy, tpr, tnr, f1;
};
extern const std::vector<ReferenceRow> kReferenceRows;  // last row: Overall

/// kReferenceRows as a `name,tp,fp,tn,fn` table with header.
std::string reference_counts_csv();

}  // namespace nalm::testing

#endif  // NALM_TESTS_SUPPORT_TESTING_HPP_
