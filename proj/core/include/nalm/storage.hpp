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

#ifndef NALM_STORAGE_HPP_
#define NALM_STORAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nalm/error.hpp"

namespace nalm {

struct Measurement {
  std::int64_t timestamp = 0;  // epoch seconds
  double watts = 0.0;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Disk or I/O failure inside the store; nothing from the failed call was
/// acknowledged.
class StorageError : public Error {
 public:
  using Error::Error;
};

/// Home ids are 1-64 characters from [A-Za-z0-9_.-] and never start
/// with '.'.
bool valid_home_id(std::string_view id);

/// Durable per-home measurement store.
///
/// Each home has an append-only log `<data_dir>/<home>.log`: the 8-byte
/// header "NALMLOG1" followed by 16-byte records (int64 epoch seconds,
/// float64 watts, little-endian). Logs are replayed on construction, later
/// records overriding earlier ones at the same timestamp; a torn trailing
/// record left by a crash is cut off.
///
/// Writes to one home are serialized and fsync'd before store() returns;
/// reads run concurrently with each other and with writes to other homes.
class MeasurementStore {
 public:
  explicit MeasurementStore(std::filesystem::path data_dir);
  ~MeasurementStore();
  MeasurementStore(const MeasurementStore&) = delete;
  MeasurementStore& operator=(const MeasurementStore&) = delete;

  /// Appends a batch and returns its size once it is on disk. Throws
  /// std::invalid_argument for a bad home id or measurement, and
  /// StorageError when the append fails.
  std::size_t store(std::string_view home, std::span<const Measurement> batch);

  /// Measurements with from <= t < to, ascending. Unknown homes yield an
  /// empty list. Throws std::invalid_argument when from > to.
  std::vector<Measurement> query(
      std::string_view home, std::int64_t from = std::numeric_limits<std::int64_t>::min(),
      std::int64_t to = std::numeric_limits<std::int64_t>::max()) const;

  /// Ids with at least one measurement, sorted.
  std::vector<std::string> homes() const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  struct HomeLog;

  HomeLog& home_log(std::string_view home);
  void replay(const std::string& home, const std::filesystem::path& file);

  std::filesystem::path data_dir_;
  mutable std::shared_mutex homes_mutex_;
  std::map<std::string, std::unique_ptr<HomeLog>, std::less<>> homes_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir = "nalm-data";
  std::size_t max_batch = 10000;
};

/// REST front end for a MeasurementStore:
///
///   POST /homes/{id}/measurements   [{"t": <int>, "w": <real>}, ...]
///        -> 200 {"accepted": n} | 400 malformed | 413 oversize | 500
///   GET  /homes/{id}/measurements?from=<int>&to=<int>
///        -> 200 [{"t": ..., "w": ...}, ...] ascending | 400 bad range
///   GET  /homes -> 200 ["a", "b", ...]
class StorageService {
 public:
  explicit StorageService(ServiceConfig config);
  ~StorageService();
  StorageService(const StorageService&) = delete;
  StorageService& operator=(const StorageService&) = delete;

  /// Binds the listening socket and returns the bound port.
  int bind();
  /// Serves until stop() is called. bind() must have succeeded.
  void serve();
  void stop();

  MeasurementStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Minimal HTTP client for StorageService.
class StorageClient {
 public:
  /// `base_url` like "http://127.0.0.1:8080".
  explicit StorageClient(const std::string& base_url);
  ~StorageClient();
  StorageClient(const StorageClient&) = delete;
  StorageClient& operator=(const StorageClient&) = delete;

  /// Throws Error carrying the HTTP status when the service rejects a call.
  std::size_t store(std::string_view home, std::span<const Measurement> batch);
  std::vector<Measurement> query(std::string_view home, std::int64_t from,
                                 std::int64_t to);
  std::vector<std::string> homes();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nalm

#endif  // NALM_STORAGE_HPP_
