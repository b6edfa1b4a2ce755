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

#include "viewgraph/label_prop.hpp"

#include <algorithm>
#include <string>

#include "viewgraph/error.hpp"

namespace viewgraph {

void LpConfig::validate() const {
  if (max_iterations < 1) throw Error("lp.max_iters must be at least 1");
}

std::vector<LabelVector> init_vectors(const ViewpointGraph& graph,
                                      const Corpus& corpus) {
  const std::size_t labels = corpus.labels.size();
  std::vector<LabelVector> vectors(graph.node_count(), LabelVector(labels, 0.0));
  for (const auto& subgraph : graph.subgraphs()) {
    const Idea* idea = corpus.find(subgraph.idea);
    if (idea == nullptr) {
      throw Error("graph idea \"" + subgraph.idea + "\" is missing from the corpus");
    }
    if (idea->split != Split::kTrain) continue;
    if (!idea->label) throw Error("train idea \"" + idea->id + "\" has no label");
    for (std::size_t node : subgraph.nodes) vectors[node][*idea->label] = 1.0;
  }
  return vectors;
}

NormalizedWeights normalize_weights(const ViewpointGraph& graph) {
  NormalizedWeights out;
  out.rows.resize(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    double total = 0.0;
    for (const auto& adj : graph.neighbors(i)) total += adj.weight;
    if (!(total > 0.0)) continue;
    auto& row = out.rows[i];
    row.reserve(graph.neighbors(i).size());
    for (const auto& adj : graph.neighbors(i)) row.emplace_back(adj.node, adj.weight / total);
  }
  return out;
}

int argmax_label(std::span<const double> vector) {
  int best = -1;
  double best_value = 0.0;
  for (std::size_t j = 0; j < vector.size(); ++j) {
    if (vector[j] > best_value) {
      best_value = vector[j];
      best = static_cast<int>(j);
    }
  }
  return best;
}

PropagationResult propagate(std::vector<LabelVector> vectors,
                            const NormalizedWeights& weights,
                            const LpConfig& config) {
  config.validate();
  if (weights.rows.size() != vectors.size()) {
    throw Error("propagate: weights and vectors differ in node count");
  }
  const std::size_t n = vectors.size();
  const std::size_t dim = n ? vectors.front().size() : 0;

  PropagationResult result;
  std::vector<LabelVector> next(n, LabelVector(dim, 0.0));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = argmax_label(vectors[i]);

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& out = next[i];
      std::copy(vectors[i].begin(), vectors[i].end(), out.begin());
      for (const auto& [j, w] : weights.rows[i]) {
        const auto& src = vectors[j];
        for (std::size_t c = 0; c < dim; ++c) out[c] += w * src[c];
      }
      double z = 0.0;
      for (double v : out) z += v;
      if (z > 0.0) {
        for (double& v : out) v /= z;
      }
    }
    std::swap(vectors, next);
    result.iterations = iter + 1;

    if (config.early_stop) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        const int label = argmax_label(vectors[i]);
        if (label != labels[i]) changed = true;
        labels[i] = label;
      }
      if (!changed) {
        result.converged = true;
        break;
      }
    }
  }
  result.vectors = std::move(vectors);
  return result;
}

IdeaPrediction predict_idea(const std::vector<LabelVector>& vectors,
                            std::span<const std::size_t> nodes) {
  if (nodes.empty()) throw Error("predict_idea: idea has no nodes");
  IdeaPrediction out;
  out.summed.assign(vectors.at(nodes.front()).size(), 0.0);
  for (std::size_t node : nodes) {
    const auto& v = vectors.at(node);
    for (std::size_t c = 0; c < v.size(); ++c) out.summed[c] += v[c];
  }
  const int label = argmax_label(out.summed);
  out.unreached = label < 0;
  out.label = label < 0 ? 0 : static_cast<std::size_t>(label);
  return out;
}

std::vector<LpPrediction> run_label_propagation(const ViewpointGraph& graph,
                                                const Corpus& corpus,
                                                const LpConfig& config,
                                                Split split) {
  auto result =
      propagate(init_vectors(graph, corpus), normalize_weights(graph), config);
  std::vector<LpPrediction> out;
  for (const auto& subgraph : graph.subgraphs()) {
    const Idea* idea = corpus.find(subgraph.idea);
    if (idea == nullptr || idea->split != split) continue;
    out.push_back({subgraph.idea, predict_idea(result.vectors, subgraph.nodes)});
  }
  return out;
}

}  // namespace viewgraph
