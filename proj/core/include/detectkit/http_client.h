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

#ifndef DETECTKIT_HTTP_CLIENT_H_
#define DETECTKIT_HTTP_CLIENT_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>

namespace detectkit {

// Connection settings shared by every external service client (detectors,
// paraphrasers, embedders).
struct EndpointConfig {
  std::string url;  // http://host[:port]/path
  std::chrono::milliseconds timeout{10000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  double requests_per_minute = 60.0;  // <= 0 disables rate limiting
  int burst = 1;
  int max_concurrency = 1;
  // Name of the environment variable holding a bearer token; empty for none.
  std::string api_key_env;
};

// Token bucket: `burst` tokens, refilled at requests_per_minute / 60 per second.
class RateLimiter {
 public:
  RateLimiter(double requests_per_minute, int burst);

  // Blocks until a token is available, then takes it.
  void Acquire();

 private:
  using Clock = std::chrono::steady_clock;

  std::mutex mu_;
  double rate_per_second_;
  double capacity_;
  double tokens_;
  Clock::time_point last_refill_;
};

// Blocking counting semaphore with a runtime limit.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int limit);
  void Acquire();
  void Release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

// POSTs JSON bodies to one endpoint, honoring the rate limit and concurrency
// cap. Connection failures, timeouts, 429 and 5xx responses are retried with
// exponential backoff (initial_backoff * 2^attempt, capped at max_backoff);
// exhausting the retries throws kRateLimited, kTimeout or kExternal after
// whichever failure came last. Other 4xx responses fail immediately.
class JsonHttpClient {
 public:
  // Resolves the API key eagerly: a named but unset variable throws
  // kInvalidConfig before any request is attempted.
  explicit JsonHttpClient(EndpointConfig config);

  JsonHttpClient(const JsonHttpClient&) = delete;
  JsonHttpClient& operator=(const JsonHttpClient&) = delete;

  // Returns the 2xx response body.
  std::string Post(const std::string& json_body);

  const EndpointConfig& config() const { return config_; }

  // Number of HTTP requests actually sent, retries included.
  std::size_t requests_sent() const { return requests_sent_.load(); }

 private:
  EndpointConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
  std::string api_key_;
  RateLimiter rate_limiter_;
  ConcurrencyLimiter concurrency_;
  std::atomic<std::size_t> requests_sent_{0};
};

}  // namespace detectkit

#endif  // DETECTKIT_HTTP_CLIENT_H_
