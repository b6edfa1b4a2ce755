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

// Training-free evaluation: label vectors are spread from train viewpoints
// over the row-normalized graph, then each test idea takes the argmax of its
// summed viewpoint vectors.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/graph.hpp"

namespace viewgraph {

using LabelVector = std::vector<double>;

struct LpConfig {
  std::size_t max_iterations = 5;
  bool early_stop = true;

  void validate() const;
};

// Per node, (neighbor, weight / incident weight sum). Nodes whose incident
// weights sum to zero get an empty row.
struct NormalizedWeights {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
};

// One-hot at the idea's label for train nodes, zero vectors elsewhere.
std::vector<LabelVector> init_vectors(const ViewpointGraph& graph,
                                      const Corpus& corpus);

NormalizedWeights normalize_weights(const ViewpointGraph& graph);

struct PropagationResult {
  std::vector<LabelVector> vectors;
  std::size_t iterations = 0;
  // True when early stopping saw an iteration that changed no argmax.
  bool converged = false;
};

// Synchronous updates d' = (d + sum_j w_ij d_j) / Z with Z the L1 norm of the
// numerator (1 when it is all zero).
PropagationResult propagate(std::vector<LabelVector> vectors,
                            const NormalizedWeights& weights,
                            const LpConfig& config);

// Index of the largest entry, lowest index on ties. -1 for an all-zero vector.
int argmax_label(std::span<const double> vector);

struct IdeaPrediction {
  std::size_t label = 0;
  LabelVector summed;
  // The summed vector was all zero; label falls back to 0.
  bool unreached = false;
};

IdeaPrediction predict_idea(const std::vector<LabelVector>& vectors,
                            std::span<const std::size_t> nodes);

struct LpPrediction {
  std::string idea;
  IdeaPrediction prediction;
};

// Full pipeline over the graph: init, normalize, propagate, predict every idea
// of `split`.
std::vector<LpPrediction> run_label_propagation(const ViewpointGraph& graph,
                                                const Corpus& corpus,
                                                const LpConfig& config,
                                                Split split = Split::kTest);

}  // namespace viewgraph
