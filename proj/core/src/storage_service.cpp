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

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nalm/log.hpp"
#include "nalm/storage.hpp"

namespace nalm {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void reply_error(httplib::Response& res, int status, std::string_view message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), kJson);
}

// Parses a POST body into measurements; false plus a message on failure.
bool parse_batch(const std::string& body, std::vector<Measurement>& out,
                 std::string& error) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    error = "body is not valid JSON";
    return false;
  }
  if (!j.is_array()) {
    error = "body must be a JSON array";
    return false;
  }
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("t") || !item.contains("w")) {
      error = fmt::format("item {}: expected {{\"t\": int, \"w\": number}}", i);
      return false;
    }
    const auto& t = item["t"];
    const auto& w = item["w"];
    if (!t.is_number_integer() || !w.is_number()) {
      error = fmt::format("item {}: t must be an integer and w a number", i);
      return false;
    }
    if (t.is_number_unsigned() &&
        t.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      error = fmt::format("item {}: t out of range", i);
      return false;
    }
    const double watts = w.get<double>();
    if (!std::isfinite(watts) || watts < 0.0) {
      error = fmt::format("item {}: w must be finite and >= 0", i);
      return false;
    }
    out.push_back({t.get<std::int64_t>(), watts});
  }
  return true;
}

bool parse_bound(const httplib::Request& req, const char* key, std::int64_t fallback,
                 std::int64_t& out) {
  if (!req.has_param(key)) {
    out = fallback;
    return true;
  }
  const auto text = req.get_param_value(key);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

json measurements_json(const std::vector<Measurement>& ms) {
  json arr = json::array();
  for (const auto& m : ms) arr.push_back({{"t", m.timestamp}, {"w", m.watts}});
  return arr;
}

}  // namespace

struct StorageService::Impl {
  ServiceConfig config;
  MeasurementStore store;
  httplib::Server server;
  int port = -1;

  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.data_dir) {
    server.set_payload_max_length(256u << 20);

    server.Post(R"(/homes/([^/]+)/measurements)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const std::string home = req.matches[1];
                  if (!valid_home_id(home)) return reply_error(res, 400, "invalid home id");
                  std::vector<Measurement> batch;
                  std::string error;
                  if (!parse_batch(req.body, batch, error)) return reply_error(res, 400, error);
                  if (batch.empty()) return reply_error(res, 400, "batch is empty");
                  if (batch.size() > config.max_batch) {
                    return reply_error(res, 413, fmt::format("batch of {} exceeds limit {}",
                                                             batch.size(), config.max_batch));
                  }
                  try {
                    const auto accepted = store.store(home, batch);
                    res.set_content(json{{"accepted", accepted}}.dump(), kJson);
                  } catch (const StorageError& e) {
                    logger().error("store failed for home '{}': {}", home, e.what());
                    reply_error(res, 500, "storage failure");
                  }
                });

    server.Get(R"(/homes/([^/]+)/measurements)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const std::string home = req.matches[1];
                 if (!valid_home_id(home)) return reply_error(res, 400, "invalid home id");
                 std::int64_t from = 0, to = 0;
                 if (!parse_bound(req, "from", std::numeric_limits<std::int64_t>::min(), from) ||
                     !parse_bound(req, "to", std::numeric_limits<std::int64_t>::max(), to)) {
                   return reply_error(res, 400, "from/to must be integers");
                 }
                 if (from > to) return reply_error(res, 400, "from must not exceed to");
                 res.set_content(measurements_json(store.query(home, from, to)).dump(), kJson);
               });

    server.Get("/homes", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(json(store.homes()).dump(), kJson);
    });

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "internal error";
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          logger().error("request failed: {}", what);
          reply_error(res, 500, "internal error");
        });
  }
};

StorageService::StorageService(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

StorageService::~StorageService() { stop(); }

int StorageService::bind() {
  auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->server.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) {
    throw StorageError(fmt::format("cannot listen on {}:{}", c.host, c.port));
  }
  return impl_->port;
}

void StorageService::serve() {
  if (impl_->port < 0) throw std::logic_error("StorageService::serve before bind");
  impl_->server.listen_after_bind();
}

void StorageService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

MeasurementStore& StorageService::store() { return impl_->store; }

struct StorageClient::Impl {
  httplib::Client client;
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    client.set_write_timeout(60);
  }
};

namespace {

json checked_body(const httplib::Result& res, std::string_view what) {
  if (!res) {
    throw Error(fmt::format("{}: request failed ({})", what, httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw Error(fmt::format("{}: HTTP {}: {}", what, res->status, res->body));
  }
  json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw Error(fmt::format("{}: response is not JSON", what));
  return j;
}

}  // namespace

StorageClient::StorageClient(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)) {}

StorageClient::~StorageClient() = default;

std::size_t StorageClient::store(std::string_view home,
                                 std::span<const Measurement> batch) {
  json body = json::array();
  for (const auto& m : batch) body.push_back({{"t", m.timestamp}, {"w", m.watts}});
  const auto res = impl_->client.Post(fmt::format("/homes/{}/measurements", home),
                                      body.dump(), kJson);
  return checked_body(res, "store").at("accepted").get<std::size_t>();
}

std::vector<Measurement> StorageClient::query(std::string_view home,
                                              std::int64_t from, std::int64_t to) {
  const auto res = impl_->client.Get(
      fmt::format("/homes/{}/measurements?from={}&to={}", home, from, to));
  std::vector<Measurement> out;
  for (const auto& item : checked_body(res, "query")) {
    out.push_back({item.at("t").get<std::int64_t>(), item.at("w").get<double>()});
  }
  return out;
}

std::vector<std::string> StorageClient::homes() {
  return checked_body(impl_->client.Get("/homes"), "homes").get<std::vector<std::string>>();
}

}  // namespace nalm
