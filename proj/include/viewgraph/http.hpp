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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace viewgraph {

struct RetryPolicy {
  // Extra attempts after the first one.
  int max_retries = 3;
  // Delay before the first retry; doubles on every further retry.
  double initial_backoff_seconds = 1.0;
  double timeout_seconds = 60.0;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// POSTs a JSON body and returns the parsed JSON reply. Transport failures,
// 429 and 5xx statuses are retried with exponential backoff; other non-2xx
// statuses and unparseable bodies fail immediately. Throws TransportError.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const HttpHeaders& headers, const RetryPolicy& policy);

}  // namespace viewgraph
