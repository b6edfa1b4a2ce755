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

// The viewpoint-graph: one subgraph per idea whose nodes are its viewpoints.
// Intra edges join each node to its top-k most similar viewpoints of the same
// idea; inter edges join it to its top-m most similar viewpoints of other
// ideas. Weights are cosine similarities clamped to [weight_floor, 1].

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/embedding.hpp"

namespace viewgraph {

struct GraphConfig {
  std::size_t intra_degree = 5;   // k
  std::size_t inter_degree = 10;  // m
  double weight_floor = 0.0;

  void validate() const;
  bool operator==(const GraphConfig&) const = default;
};

enum class EdgeKind { kIntra, kInter };

struct ViewpointNode {
  std::size_t id = 0;
  std::string text;
  std::string idea;
  // Row of ViewpointGraph::features().
  std::size_t row = 0;
  double time = 0.0;

  bool operator==(const ViewpointNode&) const = default;
};

// Endpoints are stored with u < v.
struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
  EdgeKind kind = EdgeKind::kIntra;

  bool operator==(const WeightedEdge&) const = default;
};

struct Adjacent {
  std::size_t node;
  double weight;
  EdgeKind kind;
};

// One idea's membership record.
struct Subgraph {
  std::string idea;
  Split split = Split::kUnassigned;
  std::int64_t timestamp = 0;
  std::vector<std::size_t> nodes;

  bool operator==(const Subgraph&) const = default;
};

// Input to graph construction: one idea and its viewpoint texts.
struct IdeaViewpoints {
  std::string idea;
  Split split = Split::kUnassigned;
  std::int64_t timestamp = 0;
  std::vector<std::string> texts;
};

class ViewpointGraph {
 public:
  ViewpointGraph() = default;

  // Validates every invariant (dense ids, one idea per node, no self-loops,
  // unique pairs, weights in [floor, 1], intra/inter kinds consistent with
  // membership) and derives the adjacency lists. Throws on violation.
  ViewpointGraph(GraphConfig config, std::vector<Subgraph> subgraphs,
                 std::vector<ViewpointNode> nodes, EmbeddingMatrix features,
                 std::vector<WeightedEdge> edges);

  const GraphConfig& config() const { return config_; }
  const std::vector<Subgraph>& subgraphs() const { return subgraphs_; }
  const std::vector<ViewpointNode>& nodes() const { return nodes_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  const EmbeddingMatrix& features() const { return features_; }
  const std::vector<Adjacent>& neighbors(std::size_t node) const {
    return adjacency_[node];
  }
  std::size_t node_count() const { return nodes_.size(); }

  // nullptr when the idea is not in the graph.
  const Subgraph* find_subgraph(std::string_view idea) const;
  std::size_t subgraph_index_of_node(std::size_t node) const {
    return node_subgraph_[node];
  }

  std::size_t degree(std::size_t node, EdgeKind kind) const;

  bool operator==(const ViewpointGraph& other) const;

 private:
  GraphConfig config_;
  std::vector<Subgraph> subgraphs_;
  std::vector<ViewpointNode> nodes_;
  EmbeddingMatrix features_;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<Adjacent>> adjacency_;
  std::vector<std::size_t> node_subgraph_;
};

// Intra edges of one idea. `nodes` are row indices of `features`.
std::vector<WeightedEdge> build_subgraph(std::span<const std::size_t> nodes,
                                         const EmbeddingMatrix& features,
                                         const GraphConfig& config);

// Rows of `embeddings` follow (idea order, viewpoint order), which is also
// the node id order of the result.
ViewpointGraph build_graph(const std::vector<IdeaViewpoints>& ideas,
                           const EmbeddingMatrix& embeddings,
                           const GraphConfig& config);

// Appends one idea. New nodes propose their top-k intra and top-m inter
// edges; every existing node re-ranks only its current inter neighbors plus
// the new nodes and gains edges to new nodes that make its top-m. Existing
// edges are never removed. Time features of all nodes are re-encoded.
ViewpointGraph integrate_subgraph(const ViewpointGraph& graph,
                                  const IdeaViewpoints& idea,
                                  const EmbeddingMatrix& embeddings,
                                  const GraphConfig& config);

// JSON {config, ideas, nodes: [{id, idea, text, t, row, e}],
//       edges: [[u, v, w, kind]]}.
void save_graph(const ViewpointGraph& graph, const std::filesystem::path& path);
ViewpointGraph load_graph(const std::filesystem::path& path);

std::string graph_to_json(const ViewpointGraph& graph);
ViewpointGraph graph_from_json(const std::string& text);

}  // namespace viewgraph
