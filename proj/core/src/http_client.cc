// Copyright 2026 The detectkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "detectkit/http_client.h"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "detectkit/error.h"
#include "httplib.h"

namespace detectkit {
namespace {

struct ParsedUrl {
  std::string base;
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  constexpr std::string_view kHttp = "http://";
  if (url.rfind(kHttp, 0) != 0) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint url must start with http:// ('" + url + "')");
  }
  const std::size_t slash = url.find('/', kHttp.size());
  ParsedUrl out;
  out.base = slash == std::string::npos ? url : url.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (out.base.size() == kHttp.size()) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint url has no host ('" + url + "')");
  }
  return out;
}

}  // namespace

RateLimiter::RateLimiter(double requests_per_minute, int burst)
    : rate_per_second_(requests_per_minute / 60.0),
      capacity_(std::max(1, burst)),
      tokens_(capacity_),
      last_refill_(Clock::now()) {}

void RateLimiter::Acquire() {
  if (rate_per_second_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    last_refill_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

ConcurrencyLimiter::ConcurrencyLimiter(int limit) : available_(std::max(1, limit)) {}

void ConcurrencyLimiter::Acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return available_ > 0; });
  --available_;
}

void ConcurrencyLimiter::Release() {
  {
    std::lock_guard lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

JsonHttpClient::JsonHttpClient(EndpointConfig config)
    : config_(std::move(config)),
      rate_limiter_(config_.requests_per_minute, config_.burst),
      concurrency_(config_.max_concurrency) {
  const ParsedUrl parsed = SplitUrl(config_.url);
  base_ = parsed.base;
  path_ = parsed.path;
  if (!config_.api_key_env.empty()) {
    const char* value = std::getenv(config_.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw Error(ErrorCode::kInvalidConfig,
                  "environment variable '" + config_.api_key_env + "' is not set");
    }
    api_key_ = value;
  }
  if (config_.max_retries < 0) throw Error(ErrorCode::kInvalidConfig, "max_retries must be >= 0");
}

std::string JsonHttpClient::Post(const std::string& json_body) {
  struct Slot {
    ConcurrencyLimiter& limiter;
    explicit Slot(ConcurrencyLimiter& l) : limiter(l) { limiter.Acquire(); }
    ~Slot() { limiter.Release(); }
  } slot(concurrency_);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  ErrorCode last_code = ErrorCode::kExternal;
  std::string last_message;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.max_backoff);
    }
    rate_limiter_.Acquire();
    httplib::Client client(base_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    ++requests_sent_;
    auto res = client.Post(path_, headers, json_body, "application/json");
    if (!res) {
      const auto err = res.error();
      last_code = (err == httplib::Error::Read || err == httplib::Error::Write ||
                   err == httplib::Error::ConnectionTimeout)
                      ? ErrorCode::kTimeout
                      : ErrorCode::kExternal;
      last_message = "request to " + config_.url + " failed: " + httplib::to_string(err);
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_message = "request to " + config_.url + " returned HTTP " + std::to_string(res->status);
    if (res->status == 429) {
      last_code = ErrorCode::kRateLimited;
      continue;
    }
    if (res->status >= 500) {
      last_code = ErrorCode::kExternal;
      continue;
    }
    throw Error(ErrorCode::kExternal, last_message);
  }
  throw Error(last_code, last_message + " (after " + std::to_string(config_.max_retries) +
                             " retries)");
}

}  // namespace detectkit
