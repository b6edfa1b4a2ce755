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

// Label-separable toy corpus for tests and demos. Each label owns a random
// unit centroid; every viewpoint embedding is its idea's centroid plus
// Gaussian noise, normalized. Labels alternate over ideas and timestamps
// advance by a fixed step.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/embedding.hpp"
#include "viewgraph/graph.hpp"

namespace viewgraph {

struct SyntheticOptions {
  std::size_t ideas = 40;
  std::size_t labels = 2;
  std::size_t viewpoints_per_idea = 4;
  std::size_t dimension = 16;
  // Standard deviation of the noise vector's norm relative to the centroid.
  double noise = 0.8;
  std::int64_t first_timestamp = 1700000000;
  std::int64_t timestamp_step = 1800;
  SplitFractions fractions{0.6, 0.1, 0.3};
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Corpus corpus;  // already split
  std::vector<IdeaViewpoints> viewpoints;
  EmbeddingMatrix embeddings;  // rows follow (idea, viewpoint) order
};

SyntheticCorpus make_synthetic(const SyntheticOptions& options = {});

}  // namespace viewgraph
