// Copyright 2026 The viewgraph Authors
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

#include "viewgraph/http.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "viewgraph/error.hpp"

namespace viewgraph {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("endpoint \"" + url + "\" lacks a scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const HttpHeaders& headers,
                         const RetryPolicy& policy) {
  const SplitUrl target = split_url(url);
  httplib::Headers request_headers;
  for (const auto& [key, value] : headers) request_headers.emplace(key, value);
  const std::string payload = body.dump();

  const int max_attempts = 1 + std::max(0, policy.max_retries);
  double backoff = policy.initial_backoff_seconds;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1 && backoff > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    httplib::Client client(target.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(policy.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto result =
        client.Post(target.path, request_headers, payload, "application/json");
    if (!result) {
      last_error = "POST " + url + " failed: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
      last_error = "POST " + url + " returned HTTP " + std::to_string(status);
      continue;
    }
    if (status < 200 || status >= 300) {
      throw TransportError("POST " + url + " returned HTTP " +
                               std::to_string(status) + ": " + result->body,
                           attempt);
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError("POST " + url + " returned invalid JSON: " + e.what(),
                           attempt);
    }
  }
  throw TransportError(last_error, max_attempts);
}

}  // namespace viewgraph
