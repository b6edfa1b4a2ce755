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

#include "viewgraph/novelty.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "test_util.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/synthetic.hpp"

using namespace viewgraph;

namespace {

struct Setup {
  SyntheticCorpus data;
  ViewpointGraph graph;
};

Setup setup(std::size_t ideas = 20, std::uint64_t seed = 0) {
  SyntheticOptions opts;
  opts.ideas = ideas;
  opts.seed = seed;
  Setup s{make_synthetic(opts), {}};
  s.graph = build_graph(s.data.viewpoints, s.data.embeddings, GraphConfig{});
  return s;
}

NegativeOptions options(std::size_t count, std::vector<PlagiarismKind> kinds = {PlagiarismKind::kCopy,
                                                                                 PlagiarismKind::kRandomSwap,
                                                                                 PlagiarismKind::kNeighborSwap}) {
  NegativeOptions o;
  o.count = count;
  o.strategies = std::move(kinds);
  o.train_subset = std::min<std::size_t>(count, 2);
  o.seed = 5;
  return o;
}

std::vector<std::string> source_texts(const Setup& s, const std::string& idea) {
  std::vector<std::string> out;
  for (std::size_t node : s.graph.find_subgraph(idea)->nodes) out.push_back(s.graph.nodes()[node].text);
  return out;
}

}  // namespace

TEST(EncodeTime, MinMaxExamples) {
  const std::vector<std::int64_t> years = {1609459200, 1640995200, 1672531200};
  const auto enc = encode_time(years);
  EXPECT_EQ(enc.feature(years[0]), 0.0);
  EXPECT_NEAR(enc.feature(years[1]), 0.5, 2e-3);
  EXPECT_EQ(enc.feature(years[2]), 1.0);
  const std::vector<std::int64_t> exact = {0, 50, 100};
  EXPECT_DOUBLE_EQ(encode_time(exact).feature(50), 0.5);
  const std::vector<std::int64_t> same = {7, 7, 7};
  EXPECT_EQ(encode_time(same).feature(7), 0.0);
  EXPECT_THROW(encode_time(std::span<const std::int64_t>{}), Error);
}

TEST(EncodeTime, LaterIdeaKeepsOrdering) {
  std::vector<std::int64_t> stamps = {5, 1, 9, 3};
  const auto before = encode_time(stamps);
  stamps.push_back(20);
  const auto after = encode_time(stamps);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (stamps[i] < stamps[j]) {
        ASSERT_LT(before.feature(stamps[i]), before.feature(stamps[j]));
        ASSERT_LT(after.feature(stamps[i]), after.feature(stamps[j]));
      }
}

TEST(EncodeTime, FromCorpus) {
  const auto s = setup(4);
  const auto enc = encode_time(s.data.corpus);
  EXPECT_EQ(enc.min_timestamp, 1700000000);
  EXPECT_EQ(enc.max_timestamp, 1700000000 + 3 * 1800);
}

TEST(Strategy, NamesRoundTrip) {
  for (auto k : {PlagiarismKind::kCopy, PlagiarismKind::kRandomSwap, PlagiarismKind::kNeighborSwap})
    EXPECT_EQ(parse_plagiarism(plagiarism_name(k)), k);
  EXPECT_THROW(parse_plagiarism("paraphrase"), Error);
}

TEST(NegativeOptions, Validation) {
  auto o = options(3);
  o.swap_fraction = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o = options(3);
  o.train_subset = 4;
  EXPECT_THROW(o.validate(), Error);
  o = options(3, {});
  EXPECT_THROW(o.validate(), Error);
}

TEST(Generate, EvenSplitOverStrategies) {
  const auto s = setup();
  const auto three = generate_negatives(s.data.corpus, s.graph, options(3));
  std::map<PlagiarismKind, int> counts;
  for (const auto& n : three.samples) ++counts[n.strategy];
  EXPECT_EQ(counts[PlagiarismKind::kCopy], 1);
  EXPECT_EQ(counts[PlagiarismKind::kRandomSwap], 1);
  EXPECT_EQ(counts[PlagiarismKind::kNeighborSwap], 1);

  auto o = options(80);
  o.train_subset = 10;
  const auto eighty = generate_negatives(s.data.corpus, s.graph, o);
  counts.clear();
  std::size_t train = 0;
  for (const auto& n : eighty.samples) {
    ++counts[n.strategy];
    train += n.split == Split::kTrain;
  }
  EXPECT_EQ(counts[PlagiarismKind::kCopy], 27);
  EXPECT_EQ(counts[PlagiarismKind::kRandomSwap], 27);
  EXPECT_EQ(counts[PlagiarismKind::kNeighborSwap], 26);
  EXPECT_EQ(train, 10u);
}

TEST(Generate, CopyAndSwapSemantics) {
  const auto s = setup();
  auto o = options(30);
  o.swap_fraction = 0.5;
  const auto set = generate_negatives(s.data.corpus, s.graph, o);
  std::int64_t latest = 0;
  for (const auto& idea : s.data.corpus.ideas) latest = std::max(latest, idea.timestamp);
  for (const auto& n : set.samples) {
    const Idea* source = s.data.corpus.find(n.source_id);
    ASSERT_NE(source, nullptr);
    EXPECT_EQ(source->split, Split::kTrain);
    EXPECT_GE(*source->label, o.min_source_label);
    EXPECT_EQ(n.label, 0u);
    EXPECT_EQ(n.timestamp, latest + kSecondsPerDay);
    EXPECT_GT(n.timestamp, source->timestamp);
    const auto original = source_texts(s, n.source_id);
    ASSERT_EQ(n.viewpoints.size(), original.size());
    std::size_t differing = 0;
    for (std::size_t i = 0; i < original.size(); ++i) differing += n.viewpoints[i] != original[i];
    if (n.strategy == PlagiarismKind::kCopy) {
      EXPECT_EQ(differing, 0u);
    } else {
      EXPECT_EQ(differing, static_cast<std::size_t>(std::ceil(0.5 * double(original.size()))));
    }
  }
}

TEST(Generate, DeterministicUnderSeed) {
  const auto s = setup();
  const auto a = generate_negatives(s.data.corpus, s.graph, options(12));
  const auto b = generate_negatives(s.data.corpus, s.graph, options(12));
  EXPECT_EQ(a.samples, b.samples);
  auto other = options(12);
  other.seed = 6;
  EXPECT_NE(generate_negatives(s.data.corpus, s.graph, other).samples, a.samples);
}

TEST(Generate, NoEligibleSourceIsAnError) {
  const auto s = setup();
  auto o = options(3);
  o.min_source_label = 1;
  auto corpus = s.data.corpus;
  for (auto& idea : corpus.ideas)
    if (idea.label) idea.label = 0;
  EXPECT_THROW(generate_negatives(corpus, s.graph, o), Error);
}

TEST(Generate, NeighborSwapFallsBackWithoutInterEdges) {
  SyntheticOptions opts;
  opts.ideas = 6;
  const auto data = make_synthetic(opts);
  GraphConfig gc;
  gc.inter_degree = 0;
  const auto graph = build_graph(data.viewpoints, data.embeddings, gc);
  const auto set = generate_negatives(data.corpus, graph, options(2, {PlagiarismKind::kNeighborSwap}));
  EXPECT_GT(set.warnings, 0u);
  for (const auto& n : set.samples) EXPECT_NE(n.viewpoints, source_texts({data, graph}, n.source_id));
}

TEST(Generate, IdsAvoidCollisions) {
  auto s = setup();
  auto corpus = s.data.corpus;
  corpus.ideas[0].id = "neg-0";
  auto viewpoints = s.data.viewpoints;
  viewpoints[0].idea = "neg-0";
  const auto graph = build_graph(viewpoints, s.data.embeddings, GraphConfig{});
  const auto set = generate_negatives(corpus, graph, options(3));
  for (const auto& n : set.samples) EXPECT_NE(n.id, "neg-0");
}

TEST(Inject, CopyConnectsToSourceWithWeightOne) {
  const auto s = setup();
  const auto set = generate_negatives(s.data.corpus, s.graph, options(1, {PlagiarismKind::kCopy}));
  const auto& neg = set.samples[0];
  const auto g = inject_negatives(s.graph, set.samples, GraphConfig{});
  EXPECT_EQ(g.node_count(), s.graph.node_count() + neg.viewpoints.size());
  const auto* added = g.find_subgraph(neg.id);
  ASSERT_NE(added, nullptr);
  EXPECT_EQ(added->split, Split::kUnassigned);
  const auto* source = g.find_subgraph(neg.source_id);
  for (std::size_t k = 0; k < added->nodes.size(); ++k) {
    const std::size_t node = added->nodes[k];
    EXPECT_DOUBLE_EQ(g.nodes()[node].time, 1.0);
    bool found = false;
    for (const auto& adj : g.neighbors(node))
      if (adj.node == source->nodes[k]) {
        found = true;
        EXPECT_NEAR(adj.weight, 1.0, 1e-12);
        EXPECT_EQ(adj.kind, EdgeKind::kInter);
      }
    EXPECT_TRUE(found);
  }
}

TEST(Inject, ThreeViewpointNegativeGetsInterEdges) {
  SyntheticOptions opts;
  opts.ideas = 10;
  opts.viewpoints_per_idea = 3;
  const auto data = make_synthetic(opts);
  const auto graph = build_graph(data.viewpoints, data.embeddings, GraphConfig{});
  const auto set = generate_negatives(data.corpus, graph, options(1, {PlagiarismKind::kRandomSwap}));
  const auto g = inject_negatives(graph, set.samples, GraphConfig{});
  const auto* added = g.find_subgraph(set.samples[0].id);
  ASSERT_EQ(added->nodes.size(), 3u);
  for (std::size_t node : added->nodes) EXPECT_GE(g.degree(node, EdgeKind::kInter), 1u);
}

TEST(Inject, CollisionAndUnknownTextRejected) {
  const auto s = setup();
  auto set = generate_negatives(s.data.corpus, s.graph, options(1, {PlagiarismKind::kCopy}));
  auto clash = set.samples;
  clash[0].id = s.data.corpus.ideas[0].id;
  EXPECT_THROW(inject_negatives(s.graph, clash, GraphConfig{}), Error);
  auto unknown = set.samples;
  unknown[0].viewpoints[0] = "never embedded";
  EXPECT_THROW(inject_negatives(s.graph, unknown, GraphConfig{}), Error);
}

TEST(NegativesFile, RoundTripAndErrors) {
  testutil::TempDir dir;
  const auto s = setup();
  const auto set = generate_negatives(s.data.corpus, s.graph, options(6));
  save_negatives(dir / "n.jsonl", set.samples, s.data.corpus.labels);
  EXPECT_EQ(load_negatives(dir / "n.jsonl", s.data.corpus.labels), set.samples);

  auto text = testutil::read_file(dir / "n.jsonl");
  testutil::write_file(dir / "bad.jsonl", text + "{\"id\": 1}\n");
  try {
    load_negatives(dir / "bad.jsonl", s.data.corpus.labels);
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  EXPECT_THROW(load_negatives(dir / "n.jsonl", LabelSet({"p", "q"})), RecordError);
}
