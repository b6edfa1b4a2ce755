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

#include <cstdint>
#include <span>

#include "viewgraph/dataset.hpp"

namespace viewgraph {

// Min-max normalized timestamps: t = (ts - min) / (max - min), or 0 when
// every timestamp is equal.
struct TemporalEncoding {
  std::int64_t min_timestamp = 0;
  std::int64_t max_timestamp = 0;

  double feature(std::int64_t timestamp) const;
};

TemporalEncoding encode_time(std::span<const std::int64_t> timestamps);
TemporalEncoding encode_time(const Corpus& corpus);

}  // namespace viewgraph
