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

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "nalm/log.hpp"
#include "nalm/storage.hpp"

namespace nalm {
namespace {

constexpr std::string_view kLogHeader = "NALMLOG1";
constexpr std::size_t kRecordBytes = 16;

void put_le(char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>(v >> (8 * i));
}

std::uint64_t get_le(const char* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[i]);
  return v;
}

bool valid_measurement(const Measurement& m) {
  return std::isfinite(m.watts) && m.watts >= 0.0;
}

void write_all(int fd, const char* data, std::size_t size) {
  while (size > 0) {
    const auto n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StorageError(fmt::format("write failed: {}", std::strerror(errno)));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

void sync_fd(int fd) {
  if (::fdatasync(fd) != 0) {
    throw StorageError(fmt::format("fdatasync failed: {}", std::strerror(errno)));
  }
}

void sync_directory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

bool valid_home_id(std::string_view id) {
  if (id.empty() || id.size() > 64 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

struct MeasurementStore::HomeLog {
  std::filesystem::path path;
  int fd = -1;
  std::uint64_t size = 0;  // bytes of fully written records + header
  std::mutex write_mutex;
  mutable std::shared_mutex index_mutex;
  std::map<std::int64_t, double> index;

  ~HomeLog() {
    if (fd >= 0) ::close(fd);
  }
};

MeasurementStore::MeasurementStore(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir_, ec);
  if (ec) {
    throw StorageError(fmt::format("cannot create data directory '{}': {}",
                                   data_dir_.string(), ec.message()));
  }
  std::vector<std::filesystem::path> logs;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".log") {
      logs.push_back(entry.path());
    }
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& file : logs) {
    const auto home = file.stem().string();
    if (!valid_home_id(home)) {
      logger().warn("ignoring log with invalid home id: {}", file.string());
      continue;
    }
    replay(home, file);
  }
}

MeasurementStore::~MeasurementStore() = default;

void MeasurementStore::replay(const std::string& home,
                              const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) {
    throw StorageError(fmt::format("cannot read '{}'", file.string()));
  }
  auto log = std::make_unique<HomeLog>();
  log->path = file;
  std::size_t valid = 0;
  if (bytes.size() >= kLogHeader.size()) {
    if (std::string_view(bytes).substr(0, kLogHeader.size()) != kLogHeader) {
      throw StorageError(fmt::format("'{}' is not a measurement log", file.string()));
    }
    valid = kLogHeader.size();
    for (; valid + kRecordBytes <= bytes.size(); valid += kRecordBytes) {
      Measurement m{static_cast<std::int64_t>(get_le(bytes.data() + valid)),
                    std::bit_cast<double>(get_le(bytes.data() + valid + 8))};
      if (!valid_measurement(m)) {
        throw StorageError(fmt::format("'{}': corrupt record at byte {}", file.string(), valid));
      }
      log->index[m.timestamp] = m.watts;
    }
  }

  log->fd = ::open(file.c_str(), O_WRONLY | O_CLOEXEC);
  if (log->fd < 0) {
    throw StorageError(fmt::format("cannot open '{}': {}", file.string(), std::strerror(errno)));
  }
  if (valid < kLogHeader.size()) {
    // Crash while creating the log: rewrite the header.
    if (::ftruncate(log->fd, 0) != 0) throw StorageError("cannot reset log");
    ::lseek(log->fd, 0, SEEK_SET);
    write_all(log->fd, kLogHeader.data(), kLogHeader.size());
    sync_fd(log->fd);
    valid = kLogHeader.size();
  } else if (valid != bytes.size()) {
    logger().warn("'{}': dropping {} bytes of a torn record", file.string(),
                  bytes.size() - valid);
    if (::ftruncate(log->fd, static_cast<off_t>(valid)) != 0) {
      throw StorageError("cannot truncate torn log tail");
    }
    sync_fd(log->fd);
  }
  ::lseek(log->fd, static_cast<off_t>(valid), SEEK_SET);
  log->size = valid;
  homes_.emplace(home, std::move(log));
}

MeasurementStore::HomeLog& MeasurementStore::home_log(std::string_view home) {
  {
    std::shared_lock lock(homes_mutex_);
    if (auto it = homes_.find(home); it != homes_.end()) return *it->second;
  }
  std::unique_lock lock(homes_mutex_);
  if (auto it = homes_.find(home); it != homes_.end()) return *it->second;

  auto log = std::make_unique<HomeLog>();
  log->path = data_dir_ / (std::string(home) + ".log");
  log->fd = ::open(log->path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (log->fd < 0) {
    throw StorageError(fmt::format("cannot create '{}': {}", log->path.string(),
                                   std::strerror(errno)));
  }
  write_all(log->fd, kLogHeader.data(), kLogHeader.size());
  sync_fd(log->fd);
  sync_directory(data_dir_);
  log->size = kLogHeader.size();
  return *homes_.emplace(std::string(home), std::move(log)).first->second;
}

std::size_t MeasurementStore::store(std::string_view home,
                                    std::span<const Measurement> batch) {
  if (!valid_home_id(home)) {
    throw std::invalid_argument(fmt::format("invalid home id '{}'", home));
  }
  for (const auto& m : batch) {
    if (!valid_measurement(m)) {
      throw std::invalid_argument(
          fmt::format("measurement at t={} has invalid watts {}", m.timestamp, m.watts));
    }
  }
  if (batch.empty()) return 0;

  std::string bytes(batch.size() * kRecordBytes, '\0');
  for (std::size_t i = 0; i < batch.size(); ++i) {
    put_le(bytes.data() + i * kRecordBytes, static_cast<std::uint64_t>(batch[i].timestamp));
    put_le(bytes.data() + i * kRecordBytes + 8, std::bit_cast<std::uint64_t>(batch[i].watts));
  }

  HomeLog& log = home_log(home);
  std::lock_guard write_lock(log.write_mutex);
  try {
    write_all(log.fd, bytes.data(), bytes.size());
    sync_fd(log.fd);
  } catch (const StorageError&) {
    // Roll back whatever part of the batch reached the file.
    if (::ftruncate(log.fd, static_cast<off_t>(log.size)) == 0) {
      ::lseek(log.fd, static_cast<off_t>(log.size), SEEK_SET);
    }
    throw;
  }
  log.size += bytes.size();

  std::unique_lock index_lock(log.index_mutex);
  for (const auto& m : batch) log.index[m.timestamp] = m.watts;
  return batch.size();
}

std::vector<Measurement> MeasurementStore::query(std::string_view home,
                                                 std::int64_t from,
                                                 std::int64_t to) const {
  if (from > to) {
    throw std::invalid_argument(fmt::format("range start {} after end {}", from, to));
  }
  const HomeLog* log = nullptr;
  {
    std::shared_lock lock(homes_mutex_);
    auto it = homes_.find(home);
    if (it == homes_.end()) return {};
    log = it->second.get();
  }
  std::shared_lock lock(log->index_mutex);
  std::vector<Measurement> out;
  for (auto it = log->index.lower_bound(from); it != log->index.end() && it->first < to; ++it) {
    out.push_back({it->first, it->second});
  }
  return out;
}

std::vector<std::string> MeasurementStore::homes() const {
  std::shared_lock lock(homes_mutex_);
  std::vector<std::string> out;
  for (const auto& [home, log] : homes_) {
    std::shared_lock index_lock(log->index_mutex);
    if (!log->index.empty()) out.push_back(home);
  }
  return out;
}

}  // namespace nalm
