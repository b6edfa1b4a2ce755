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

#include "viewgraph/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/temporal.hpp"

namespace viewgraph {
namespace {

using nlohmann::json;
using EdgeKey = std::pair<std::size_t, std::size_t>;

std::string edge_label(std::size_t index, std::size_t u, std::size_t v) {
  return "edge " + std::to_string(index) + " (" + std::to_string(u) + ", " +
         std::to_string(v) + ")";
}

bool ranks_before(const ScoredNeighbor& a, const ScoredNeighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.index < b.index;
}

// Top-k of an explicit candidate list under the same ordering as
// top_k_neighbors.
std::vector<ScoredNeighbor> select_top(const EmbeddingMatrix& features,
                                       std::size_t query,
                                       std::span<const std::size_t> candidates,
                                       std::size_t k) {
  std::vector<ScoredNeighbor> scored;
  scored.reserve(candidates.size());
  for (std::size_t c : candidates) {
    if (c != query) scored.push_back({c, features.similarity(query, c)});
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

double edge_weight(double similarity, const GraphConfig& config) {
  return std::clamp(similarity, config.weight_floor, 1.0);
}

void add_edge(std::map<EdgeKey, WeightedEdge>& edges, std::size_t a,
              std::size_t b, double similarity, EdgeKind kind,
              const GraphConfig& config) {
  const auto [u, v] = std::minmax(a, b);
  edges.try_emplace({u, v}, WeightedEdge{u, v, edge_weight(similarity, config), kind});
}

std::vector<WeightedEdge> flatten(const std::map<EdgeKey, WeightedEdge>& edges) {
  std::vector<WeightedEdge> out;
  out.reserve(edges.size());
  for (const auto& [key, edge] : edges) out.push_back(edge);
  return out;
}

void assign_times(std::vector<ViewpointNode>& nodes,
                  const std::vector<Subgraph>& subgraphs) {
  std::vector<std::int64_t> stamps;
  stamps.reserve(subgraphs.size());
  for (const auto& s : subgraphs) stamps.push_back(s.timestamp);
  const TemporalEncoding encoding = encode_time(stamps);
  for (const auto& s : subgraphs) {
    const double t = encoding.feature(s.timestamp);
    for (std::size_t node : s.nodes) nodes[node].time = t;
  }
}

std::string_view kind_name(EdgeKind kind) {
  return kind == EdgeKind::kIntra ? "intra" : "inter";
}

}  // namespace

void GraphConfig::validate() const {
  if (intra_degree < 1) throw Error("graph.k must be at least 1");
  if (!(weight_floor >= 0.0 && weight_floor <= 1.0)) {
    throw Error("graph.weight_floor must lie in [0, 1]");
  }
}

ViewpointGraph::ViewpointGraph(GraphConfig config, std::vector<Subgraph> subgraphs,
                               std::vector<ViewpointNode> nodes,
                               EmbeddingMatrix features,
                               std::vector<WeightedEdge> edges)
    : config_(config),
      subgraphs_(std::move(subgraphs)),
      nodes_(std::move(nodes)),
      features_(std::move(features)),
      edges_(std::move(edges)) {
  config_.validate();
  const std::size_t n = nodes_.size();
  if (features_.rows() != n) {
    throw Error("graph has " + std::to_string(n) + " nodes but " +
                std::to_string(features_.rows()) + " feature rows");
  }
  std::unordered_map<std::string, std::size_t> idea_index;
  for (std::size_t s = 0; s < subgraphs_.size(); ++s) {
    if (!idea_index.emplace(subgraphs_[s].idea, s).second) {
      throw Error("duplicate subgraph for idea \"" + subgraphs_[s].idea + "\"");
    }
  }
  node_subgraph_.assign(n, 0);
  std::vector<bool> claimed(n, false);
  for (std::size_t s = 0; s < subgraphs_.size(); ++s) {
    for (std::size_t node : subgraphs_[s].nodes) {
      if (node >= n || claimed[node]) {
        throw Error("subgraph \"" + subgraphs_[s].idea +
                    "\" lists invalid or shared node " + std::to_string(node));
      }
      claimed[node] = true;
      node_subgraph_[node] = s;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes_[i];
    if (node.id != i) {
      throw Error("node ids must be dense: position " + std::to_string(i) +
                  " holds id " + std::to_string(node.id));
    }
    if (node.row != i) throw Error("node " + std::to_string(i) + " has row " +
                                   std::to_string(node.row));
    if (!claimed[i] || subgraphs_[node_subgraph_[i]].idea != node.idea) {
      throw Error("node " + std::to_string(i) + " does not belong to idea \"" +
                  node.idea + "\"");
    }
    if (!(node.time >= 0.0 && node.time <= 1.0)) {
      throw Error("node " + std::to_string(i) + " has time feature outside [0, 1]");
    }
  }

  std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  adjacency_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.u >= n || edge.v >= n) {
      throw Error(edge_label(e, edge.u, edge.v) + " references a missing node");
    }
    if (edge.u == edge.v) throw Error(edge_label(e, edge.u, edge.v) + " is a self-loop");
    if (edge.u > edge.v) {
      throw Error(edge_label(e, edge.u, edge.v) + " is not stored with u < v");
    }
    if (e > 0 && edges_[e - 1].u == edge.u && edges_[e - 1].v == edge.v) {
      throw Error(edge_label(e, edge.u, edge.v) + " duplicates another edge");
    }
    if (!(edge.weight >= config_.weight_floor && edge.weight <= 1.0)) {
      throw Error(edge_label(e, edge.u, edge.v) + " has weight outside [floor, 1]");
    }
    const bool same_idea = node_subgraph_[edge.u] == node_subgraph_[edge.v];
    if (same_idea != (edge.kind == EdgeKind::kIntra)) {
      throw Error(edge_label(e, edge.u, edge.v) + " has the wrong kind");
    }
    adjacency_[edge.u].push_back({edge.v, edge.weight, edge.kind});
    adjacency_[edge.v].push_back({edge.u, edge.weight, edge.kind});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
  }
}

const Subgraph* ViewpointGraph::find_subgraph(std::string_view idea) const {
  for (const auto& s : subgraphs_) {
    if (s.idea == idea) return &s;
  }
  return nullptr;
}

std::size_t ViewpointGraph::degree(std::size_t node, EdgeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(adjacency_[node].begin(), adjacency_[node].end(),
                    [kind](const Adjacent& a) { return a.kind == kind; }));
}

bool ViewpointGraph::operator==(const ViewpointGraph& other) const {
  return config_ == other.config_ && subgraphs_ == other.subgraphs_ &&
         nodes_ == other.nodes_ && features_ == other.features_ &&
         edges_ == other.edges_;
}

std::vector<WeightedEdge> build_subgraph(std::span<const std::size_t> nodes,
                                         const EmbeddingMatrix& features,
                                         const GraphConfig& config) {
  std::map<EdgeKey, WeightedEdge> edges;
  for (std::size_t node : nodes) {
    for (const auto& pick : select_top(features, node, nodes, config.intra_degree)) {
      add_edge(edges, node, pick.index, pick.similarity, EdgeKind::kIntra, config);
    }
  }
  return flatten(edges);
}

ViewpointGraph build_graph(const std::vector<IdeaViewpoints>& ideas,
                           const EmbeddingMatrix& embeddings,
                           const GraphConfig& config) {
  config.validate();
  std::vector<Subgraph> subgraphs;
  std::vector<ViewpointNode> nodes;
  for (const auto& idea : ideas) {
    if (idea.texts.empty()) {
      throw Error("idea \"" + idea.idea + "\" has no viewpoints");
    }
    Subgraph subgraph{idea.idea, idea.split, idea.timestamp, {}};
    for (const auto& text : idea.texts) {
      const std::size_t id = nodes.size();
      nodes.push_back({id, text, idea.idea, id, 0.0});
      subgraph.nodes.push_back(id);
    }
    subgraphs.push_back(std::move(subgraph));
  }
  if (embeddings.rows() != nodes.size()) {
    throw Error("build_graph: " + std::to_string(nodes.size()) + " viewpoints but " +
                std::to_string(embeddings.rows()) + " embedding rows");
  }
  assign_times(nodes, subgraphs);

  std::map<EdgeKey, WeightedEdge> edges;
  for (const auto& subgraph : subgraphs) {
    for (const auto& edge : build_subgraph(subgraph.nodes, embeddings, config)) {
      edges.try_emplace({edge.u, edge.v}, edge);
    }
  }
  if (config.inter_degree > 0) {
    for (std::size_t s = 0; s < subgraphs.size(); ++s) {
      std::vector<std::size_t> foreign;
      foreign.reserve(nodes.size());
      for (std::size_t t = 0; t < subgraphs.size(); ++t) {
        if (t == s) continue;
        foreign.insert(foreign.end(), subgraphs[t].nodes.begin(), subgraphs[t].nodes.end());
      }
      std::sort(foreign.begin(), foreign.end());
      for (std::size_t node : subgraphs[s].nodes) {
        for (const auto& pick : select_top(embeddings, node, foreign, config.inter_degree)) {
          add_edge(edges, node, pick.index, pick.similarity, EdgeKind::kInter, config);
        }
      }
    }
  }
  return ViewpointGraph(config, std::move(subgraphs), std::move(nodes), embeddings,
                        flatten(edges));
}

ViewpointGraph integrate_subgraph(const ViewpointGraph& graph,
                                  const IdeaViewpoints& idea,
                                  const EmbeddingMatrix& embeddings,
                                  const GraphConfig& config) {
  config.validate();
  if (graph.find_subgraph(idea.idea) != nullptr) {
    throw Error("idea \"" + idea.idea + "\" is already in the graph");
  }
  if (idea.texts.empty()) throw Error("idea \"" + idea.idea + "\" has no viewpoints");
  if (embeddings.rows() != idea.texts.size()) {
    throw Error("integrate_subgraph: " + std::to_string(idea.texts.size()) +
                " viewpoints but " + std::to_string(embeddings.rows()) + " rows");
  }
  if (graph.node_count() > 0 && embeddings.dimension() != graph.features().dimension()) {
    throw Error("integrate_subgraph: embedding dimension differs from the graph's");
  }

  const std::size_t old_count = graph.node_count();
  std::vector<ViewpointNode> nodes = graph.nodes();
  std::vector<Subgraph> subgraphs = graph.subgraphs();
  EmbeddingMatrix features = graph.features();
  Subgraph added{idea.idea, idea.split, idea.timestamp, {}};
  for (std::size_t i = 0; i < idea.texts.size(); ++i) {
    const std::size_t id = old_count + i;
    nodes.push_back({id, idea.texts[i], idea.idea, id, 0.0});
    features.append(embeddings.row(i));
    added.nodes.push_back(id);
  }
  subgraphs.push_back(added);
  assign_times(nodes, subgraphs);

  std::map<EdgeKey, WeightedEdge> edges;
  for (const auto& edge : graph.edges()) edges.emplace(EdgeKey{edge.u, edge.v}, edge);
  for (const auto& edge : build_subgraph(added.nodes, features, config)) {
    edges.try_emplace({edge.u, edge.v}, edge);
  }

  if (config.inter_degree > 0 && old_count > 0) {
    std::vector<std::size_t> old_nodes(old_count);
    for (std::size_t i = 0; i < old_count; ++i) old_nodes[i] = i;
    for (std::size_t node : added.nodes) {
      for (const auto& pick : select_top(features, node, old_nodes, config.inter_degree)) {
        add_edge(edges, node, pick.index, pick.similarity, EdgeKind::kInter, config);
      }
    }
    for (std::size_t node = 0; node < old_count; ++node) {
      std::vector<std::size_t> pool;
      for (const auto& adj : graph.neighbors(node)) {
        if (adj.kind == EdgeKind::kInter) pool.push_back(adj.node);
      }
      pool.insert(pool.end(), added.nodes.begin(), added.nodes.end());
      for (const auto& pick : select_top(features, node, pool, config.inter_degree)) {
        if (pick.index >= old_count) {
          add_edge(edges, node, pick.index, pick.similarity, EdgeKind::kInter, config);
        }
      }
    }
  }
  return ViewpointGraph(config, std::move(subgraphs), std::move(nodes),
                        std::move(features), flatten(edges));
}

std::string graph_to_json(const ViewpointGraph& graph) {
  json doc;
  doc["config"] = {{"k", graph.config().intra_degree},
                   {"m", graph.config().inter_degree},
                   {"weight_floor", graph.config().weight_floor}};
  json ideas = json::array();
  for (const auto& s : graph.subgraphs()) {
    ideas.push_back({{"id", s.idea},
                     {"split", s.split == Split::kUnassigned
                                   ? json(nullptr)
                                   : json(std::string(split_name(s.split)))},
                     {"timestamp", s.timestamp}});
  }
  doc["ideas"] = std::move(ideas);
  json nodes = json::array();
  for (const auto& node : graph.nodes()) {
    const auto row = graph.features().row(node.row);
    nodes.push_back({{"id", node.id},
                     {"idea", node.idea},
                     {"text", node.text},
                     {"t", node.time},
                     {"row", node.row},
                     {"e", std::vector<double>(row.begin(), row.end())}});
  }
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({e.u, e.v, e.weight, kind_name(e.kind)});
  }
  doc["edges"] = std::move(edges);
  return doc.dump();
}

ViewpointGraph graph_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("graph file is not valid JSON: ") + e.what());
  }
  try {
    GraphConfig config;
    config.intra_degree = doc.at("config").at("k").get<std::size_t>();
    config.inter_degree = doc.at("config").at("m").get<std::size_t>();
    config.weight_floor = doc.at("config").value("weight_floor", 0.0);

    std::vector<Subgraph> subgraphs;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& item : doc.at("ideas")) {
      Subgraph s;
      s.idea = item.at("id").get<std::string>();
      if (const auto& split = item.at("split"); !split.is_null()) {
        s.split = parse_split(split.get<std::string>());
      }
      s.timestamp = item.value("timestamp", std::int64_t{0});
      index.emplace(s.idea, subgraphs.size());
      subgraphs.push_back(std::move(s));
    }

    std::vector<ViewpointNode> nodes;
    EmbeddingMatrix features;
    for (const auto& item : doc.at("nodes")) {
      ViewpointNode node;
      node.id = item.at("id").get<std::size_t>();
      node.idea = item.at("idea").get<std::string>();
      node.text = item.at("text").get<std::string>();
      node.time = item.at("t").get<double>();
      node.row = item.value("row", node.id);
      const auto found = index.find(node.idea);
      if (found == index.end()) {
        throw Error("node " + std::to_string(node.id) + " names unknown idea \"" +
                    node.idea + "\"");
      }
      subgraphs[found->second].nodes.push_back(node.id);
      features.append(item.at("e").get<std::vector<double>>());
      nodes.push_back(std::move(node));
    }

    std::vector<WeightedEdge> edges;
    std::map<EdgeKey, std::size_t> seen;
    const auto& list = doc.at("edges");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& item = list[i];
      if (!item.is_array() || item.size() != 4) {
        throw Error("edge " + std::to_string(i) + " is not [u, v, w, kind]");
      }
      WeightedEdge edge;
      const auto a = item[0].get<std::size_t>();
      const auto b = item[1].get<std::size_t>();
      edge.weight = item[2].get<double>();
      const auto kind = item[3].get<std::string>();
      if (kind != "intra" && kind != "inter") {
        throw Error(edge_label(i, a, b) + " has unknown kind \"" + kind + "\"");
      }
      edge.kind = kind == "intra" ? EdgeKind::kIntra : EdgeKind::kInter;
      if (a == b) throw Error(edge_label(i, a, b) + " is a self-loop");
      std::tie(edge.u, edge.v) = std::minmax(a, b);
      if (auto [it, fresh] = seen.emplace(EdgeKey{edge.u, edge.v}, i); !fresh) {
        const auto& prior = edges[it->second];
        if (prior.weight != edge.weight || prior.kind != edge.kind) {
          throw Error("asymmetric adjacency: " + edge_label(i, a, b) +
                      " disagrees with edge " + std::to_string(it->second));
        }
        throw Error(edge_label(i, a, b) + " duplicates edge " +
                    std::to_string(it->second));
      }
      edges.push_back(edge);
    }
    return ViewpointGraph(config, std::move(subgraphs), std::move(nodes),
                          std::move(features), std::move(edges));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed graph file: ") + e.what());
  }
}

void save_graph(const ViewpointGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << graph_to_json(graph) << '\n';
}

ViewpointGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return graph_from_json(buffer.str());
}

}  // namespace viewgraph
