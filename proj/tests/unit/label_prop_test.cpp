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

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "viewgraph/error.hpp"

using namespace viewgraph;

namespace {

// Graph over explicit edges; every node is its own idea unless grouped.
struct Fixture {
  ViewpointGraph graph;
  Corpus corpus;
};

Fixture make_fixture(const std::vector<std::optional<std::size_t>>& labels,
                     const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                     std::size_t label_count = 4) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < label_count; ++i) names.push_back("l" + std::to_string(i));
  Fixture f;
  f.corpus.labels = LabelSet(names);
  std::vector<Subgraph> subgraphs;
  std::vector<ViewpointNode> nodes;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string id = "n" + std::to_string(i);
    const Split split = labels[i] ? Split::kTrain : Split::kTest;
    f.corpus.ideas.push_back({id, "", "x", labels[i], 0, split});
    subgraphs.push_back({id, split, 0, {i}});
    nodes.push_back({i, "v" + std::to_string(i), id, i, 0.0});
    rows.push_back({1.0, double(i)});
  }
  std::vector<WeightedEdge> list;
  for (const auto& [u, v, w] : edges) list.push_back({std::min(u, v), std::max(u, v), w, EdgeKind::kInter});
  GraphConfig config;
  config.intra_degree = 1;
  config.inter_degree = 1;
  f.graph = ViewpointGraph(config, subgraphs, nodes, EmbeddingMatrix(rows), list);
  return f;
}

LpConfig iterations(std::size_t n, bool early = false) {
  LpConfig c;
  c.max_iterations = n;
  c.early_stop = early;
  return c;
}

}  // namespace

TEST(InitVectors, OneHotForTrainZeroOtherwise) {
  const auto f = make_fixture({2, std::nullopt, 0, 1, std::nullopt}, {});
  const auto v = init_vectors(f.graph, f.corpus);
  EXPECT_EQ(v[0], (LabelVector{0, 0, 1, 0}));
  EXPECT_EQ(v[1], (LabelVector{0, 0, 0, 0}));
  std::size_t nonzero = 0;
  for (const auto& x : v) nonzero += std::accumulate(x.begin(), x.end(), 0.0) > 0;
  EXPECT_EQ(nonzero, 3u);
}

TEST(InitVectors, MissingIdeaIsAnError) {
  auto f = make_fixture({0, 1}, {});
  f.corpus.ideas.pop_back();
  EXPECT_THROW(init_vectors(f.graph, f.corpus), Error);
}

TEST(NormalizeWeights, Examples) {
  const auto f = make_fixture({0, 0, 0, 0, 0}, {{0, 1, 0.5}, {0, 2, 0.5}, {3, 1, 0.9}, {3, 2, 0.3}});
  const auto w = normalize_weights(f.graph);
  ASSERT_EQ(w.rows[0].size(), 2u);
  EXPECT_DOUBLE_EQ(w.rows[0][0].second, 0.5);
  EXPECT_DOUBLE_EQ(w.rows[0][1].second, 0.5);
  ASSERT_EQ(w.rows[3].size(), 2u);
  EXPECT_NEAR(w.rows[3][0].second, 0.75, 1e-15);
  EXPECT_NEAR(w.rows[3][1].second, 0.25, 1e-15);
  EXPECT_TRUE(w.rows[4].empty());
}

TEST(NormalizeWeights, ZeroWeightNodeGetsEmptyRow) {
  const auto f = make_fixture({0, 0}, {{0, 1, 0.0}});
  EXPECT_TRUE(normalize_weights(f.graph).rows[0].empty());
}

TEST(Propagate, ChainTrace) {
  const auto f = make_fixture({0, std::nullopt}, {{0, 1, 1.0}}, 2);
  const auto r = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(1));
  EXPECT_EQ(r.vectors[1], (LabelVector{1, 0}));
  EXPECT_EQ(r.iterations, 1u);
}

TEST(Propagate, StarTrace) {
  const auto f = make_fixture({std::nullopt, 0, 0, 1}, {{0, 1, 0.4}, {0, 2, 0.4}, {0, 3, 0.4}}, 2);
  const auto r = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(1));
  EXPECT_NEAR(r.vectors[0][0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.vectors[0][1], 1.0 / 3.0, 1e-15);
}

TEST(Propagate, ZeroNeighborhoodStaysZero) {
  const auto f = make_fixture({std::nullopt, std::nullopt, 0}, {{0, 1, 1.0}}, 2);
  const auto r = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(5));
  EXPECT_EQ(r.vectors[0], (LabelVector{0, 0}));
  EXPECT_EQ(r.vectors[1], (LabelVector{0, 0}));
}

TEST(Propagate, EarlyStopWhenArgmaxStable) {
  const auto f = make_fixture({0, std::nullopt}, {{0, 1, 1.0}}, 2);
  const auto r = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(50, true));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.iterations, 50u);
  const auto full = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(50, false));
  EXPECT_EQ(full.iterations, 50u);
}

TEST(Propagate, DenseOracleProperty) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    std::vector<std::optional<std::size_t>> labels(n);
    for (auto& l : labels)
      if (gen() % 2) l = gen() % 3;
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (gen() % 3 == 0) edges.emplace_back(u, v, (gen() % 4 == 0) ? 0.0 : std::uniform_real_distribution<double>(0, 1)(gen));
    const auto f = make_fixture(labels, edges, 3);
    const auto init = init_vectors(f.graph, f.corpus);
    const auto weights = normalize_weights(f.graph);
    const auto dense = oracle::dense_adjacency(f.graph);
    for (std::size_t it = 1; it <= 5; ++it) {
      const auto got = propagate(init, weights, iterations(it)).vectors;
      const auto want = oracle::propagate_dense(dense, init, it);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 3; ++c) ASSERT_NEAR(got[i][c], want[i][c], 1e-9);
    }
  }
}

TEST(Propagate, SimplexAndNonNegativityProperty) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(gen, 30, 3);
    GraphConfig config;
    config.intra_degree = 2;
    config.inter_degree = 3;
    const auto graph = build_graph(inst.ideas, EmbeddingMatrix(inst.rows), config);
    Corpus corpus{LabelSet({"a", "b", "c"}), {}};
    for (const auto& idea : inst.ideas) {
      const bool train = gen() % 2;
      corpus.ideas.push_back({idea.idea, "", "x", train ? std::optional<std::size_t>(gen() % 3) : std::nullopt, 0,
                              train ? Split::kTrain : Split::kTest});
    }
    const auto r = propagate(init_vectors(graph, corpus), normalize_weights(graph), iterations(4));
    for (const auto& v : r.vectors) {
      double sum = 0;
      for (double x : v) {
        ASSERT_GE(x, 0.0);
        sum += x;
      }
      ASSERT_TRUE(sum == 0.0 || std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST(Propagate, NoTrainNodesIsAFixedPoint) {
  const auto f = make_fixture({std::nullopt, std::nullopt, std::nullopt}, {{0, 1, 0.5}, {1, 2, 0.7}}, 2);
  const auto r = propagate(init_vectors(f.graph, f.corpus), normalize_weights(f.graph), iterations(5));
  for (const auto& v : r.vectors) EXPECT_EQ(v, (LabelVector{0, 0}));
}

TEST(Propagate, LabelPermutationEquivariance) {
  std::mt19937_64 gen(15);
  const std::vector<std::size_t> perm = {2, 0, 1};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + gen() % 10;
    std::vector<std::optional<std::size_t>> labels(n), permuted(n);
    for (std::size_t i = 0; i < n; ++i)
      if (gen() % 2) {
        labels[i] = gen() % 3;
        permuted[i] = perm[*labels[i]];
      }
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1, 0.1 + 0.8 * (gen() % 100) / 100.0);
    const auto a = make_fixture(labels, edges, 3);
    const auto b = make_fixture(permuted, edges, 3);
    const auto ra = propagate(init_vectors(a.graph, a.corpus), normalize_weights(a.graph), iterations(3));
    const auto rb = propagate(init_vectors(b.graph, b.corpus), normalize_weights(b.graph), iterations(3));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 3; ++c) ASSERT_NEAR(ra.vectors[i][c], rb.vectors[i][perm[c]], 1e-12);
  }
}

TEST(Argmax, TiesAndZero) {
  EXPECT_EQ(argmax_label(std::vector<double>{0.1, 0.7, 0.2, 0}), 1);
  EXPECT_EQ(argmax_label(std::vector<double>{0.5, 0.5, 0, 0}), 0);
  EXPECT_EQ(argmax_label(std::vector<double>{0, 0}), -1);
}

TEST(PredictIdea, Examples) {
  const std::vector<LabelVector> v = {{0.1, 0.7, 0.2, 0}, {0.5, 0.5, 0, 0}, {0.5, 0.5, 0, 0},
                                      {0.2, 0.8, 0, 0}, {0.9, 0.1, 0, 0}, {0, 0, 0, 0}};
  const std::vector<std::size_t> one = {0}, tie = {1, 2}, sum = {3, 4}, zero = {5}, none = {};
  EXPECT_EQ(predict_idea(v, one).label, 1u);
  EXPECT_EQ(predict_idea(v, tie).label, 0u);
  const auto s = predict_idea(v, sum);
  EXPECT_EQ(s.label, 0u);
  EXPECT_NEAR(s.summed[0], 1.1, 1e-15);
  EXPECT_NEAR(s.summed[1], 0.9, 1e-15);
  const auto z = predict_idea(v, zero);
  EXPECT_TRUE(z.unreached);
  EXPECT_EQ(z.label, 0u);
  EXPECT_THROW(predict_idea(v, none), Error);
}

TEST(RunLabelPropagation, PredictsTestIdeas) {
  const auto f = make_fixture({0, std::nullopt, 1, std::nullopt}, {{0, 1, 0.9}, {2, 3, 0.9}, {1, 2, 0.1}}, 2);
  const auto out = run_label_propagation(f.graph, f.corpus, iterations(5, true));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].idea, "n1");
  EXPECT_EQ(out[0].prediction.label, 0u);
  EXPECT_EQ(out[1].idea, "n3");
  EXPECT_EQ(out[1].prediction.label, 1u);
}

TEST(LpConfig, Validation) {
  EXPECT_THROW(iterations(0).validate(), Error);
  EXPECT_NO_THROW(iterations(1).validate());
}
