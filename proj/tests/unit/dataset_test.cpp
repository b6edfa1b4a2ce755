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

#include "viewgraph/dataset.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "json.hpp"
#include "test_util.hpp"
#include "viewgraph/error.hpp"

using namespace viewgraph;

namespace {

const char* kHeader = R"j({"labels":["Reject","Accept (Poster)","Accept (Oral)","Accept (Spotlight)"]})j";

std::string record(const std::string& id, const std::string& label, int ts = 0) {
  nlohmann::json j = {{"id", id}, {"title", "t"}, {"text", "some text"}, {"timestamp", ts}, {"split", nullptr}};
  j["label"] = label.empty() ? nlohmann::json(nullptr) : nlohmann::json(label);
  return j.dump();
}

Corpus read(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

Corpus labeled_corpus(std::size_t n, std::size_t labels = 2) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < labels; ++i) names.push_back("l" + std::to_string(i));
  Corpus c{LabelSet(names), {}};
  for (std::size_t i = 0; i < n; ++i) {
    c.ideas.push_back({"i" + std::to_string(i), "t", "x", i % labels, std::int64_t(i), Split::kUnassigned});
  }
  return c;
}

}  // namespace

TEST(LabelSet, RejectsDuplicatesAndTinySets) {
  EXPECT_THROW(LabelSet({"a", "a"}), Error);
  EXPECT_THROW(LabelSet({"a"}), Error);
  const LabelSet s({"bad", "good"});
  EXPECT_EQ(s.index_of("good"), 1u);
  EXPECT_FALSE(s.index_of("meh"));
}

TEST(LoadCorpus, ThreeRecordsKeepOrder) {
  const Corpus c = read(std::string(kHeader) + "\n" + record("a", "Reject") + "\n" +
                        record("b", "Accept (Poster)") + "\n" + record("c", "") + "\n");
  ASSERT_EQ(c.ideas.size(), 3u);
  EXPECT_EQ(c.ideas[0].id, "a");
  EXPECT_EQ(c.ideas[2].id, "c");
  EXPECT_FALSE(c.ideas[2].label);
}

TEST(LoadCorpus, OralIsIndexTwo) {
  const Corpus c = read(std::string(kHeader) + "\n" + record("p", "Accept (Oral)") + "\n");
  EXPECT_EQ(c.ideas[0].label, 2u);
  EXPECT_EQ(c.labels, LabelSet::conference_decisions());
}

TEST(LoadCorpus, DuplicateIdReportsLaterLine) {
  const std::string text = std::string(kHeader) + "\n" + record("p1", "Reject") + "\n" +
                           record("p2", "Reject") + "\n" + record("p3", "Reject") + "\n" +
                           record("p1", "Reject") + "\n";
  try {
    read(text);
    FAIL() << "expected a duplicate-id error";
  } catch (const RecordError& e) {
    // Header is line 1, so the fourth record sits on line 5.
    EXPECT_EQ(e.line(), 5u);
    EXPECT_NE(std::string(e.what()).find("p1"), std::string::npos);
    EXPECT_NE(e.raw().find("p1"), std::string::npos);
  }
}

TEST(LoadCorpus, MalformedLineCarriesRawText) {
  const std::string bad = R"({"id": "x", "title": )";
  try {
    read(std::string(kHeader) + "\n" + record("a", "Reject") + "\n" + bad + "\n");
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.raw(), bad);
  }
}

TEST(LoadCorpus, UnknownLabelNamesTheLabel) {
  try {
    read(std::string(kHeader) + "\n" + record("a", "Maybe") + "\n");
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_NE(std::string(e.what()).find("Maybe"), std::string::npos);
  }
}

TEST(LoadCorpus, TrainIdeaNeedsLabel) {
  const std::string line =
      R"({"id":"a","title":"t","text":"x","label":null,"timestamp":0,"split":"train"})";
  EXPECT_THROW(read(std::string(kHeader) + "\n" + line + "\n"), RecordError);
}

TEST(LoadCorpus, ExpectedLabelSetMustMatch) {
  std::istringstream in(std::string(kHeader) + "\n");
  EXPECT_THROW(read_corpus(in, LabelSet({"x", "y"})), Error);
}

TEST(LoadCorpus, SaveLoadRoundTrip) {
  testutil::TempDir dir;
  Corpus c = split_corpus(labeled_corpus(9, 3), {0.5, 0.25, 0.25}, 4);
  c.ideas[3].label.reset();
  c.ideas[3].split = Split::kTest;
  c.ideas[1].title = "Quotes \" and unicode é";
  save_corpus(c, dir / "c.jsonl");
  EXPECT_EQ(load_corpus(dir / "c.jsonl"), c);
}

TEST(Fractions, MustSumToOne) {
  EXPECT_THROW(validate_fractions({0.5, 0.5, 0.5}), Error);
  EXPECT_THROW(validate_fractions({1.2, -0.1, -0.1}), Error);
  EXPECT_NO_THROW(validate_fractions({0.7, 0.1, 0.2}));
}

TEST(SplitCorpus, TenIdeasSevenOneTwo) {
  const Corpus base = labeled_corpus(10);
  const Corpus a = split_corpus(base, {0.7, 0.1, 0.2}, 7);
  EXPECT_EQ(a.in_split(Split::kTrain).size(), 7u);
  EXPECT_EQ(a.in_split(Split::kValidation).size(), 1u);
  EXPECT_EQ(a.in_split(Split::kTest).size(), 2u);
  EXPECT_EQ(split_corpus(base, {0.7, 0.1, 0.2}, 7), a);
}

TEST(SplitCorpus, EightyFiveFifteenOn66) {
  const Corpus c = split_corpus(labeled_corpus(66), {0.85, 0.0, 0.15}, 1);
  EXPECT_EQ(c.in_split(Split::kTrain).size(), 56u);
  EXPECT_EQ(c.in_split(Split::kValidation).size(), 0u);
  EXPECT_EQ(c.in_split(Split::kTest).size(), 10u);
}

TEST(SplitCorpus, DifferentSeedsDiffer) {
  const Corpus base = labeled_corpus(8);
  const Corpus a = split_corpus(base, {0.5, 0.25, 0.25}, 1);
  const Corpus b = split_corpus(base, {0.5, 0.25, 0.25}, 2);
  EXPECT_NE(a, b);
}

TEST(SplitCorpus, SerializedFormIsByteIdentical) {
  const Corpus base = labeled_corpus(20, 4);
  std::ostringstream a, b;
  write_corpus(a, split_corpus(base, {0.6, 0.2, 0.2}, 99));
  write_corpus(b, split_corpus(base, {0.6, 0.2, 0.2}, 99));
  EXPECT_EQ(a.str(), b.str());
}

TEST(SplitCorpus, PropertyNoUnlabeledTrainIdea) {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(gen);
    Corpus c = labeled_corpus(n, 3);
    for (auto& idea : c.ideas)
      if (std::bernoulli_distribution(0.3)(gen)) idea.label.reset();
    const double train = std::uniform_real_distribution<double>(0, 1)(gen);
    const double val = std::uniform_real_distribution<double>(0, 1 - train)(gen);
    const Corpus s = split_corpus(c, {train, val, 1 - train - val}, gen());
    for (const auto& idea : s.ideas) {
      ASSERT_NE(idea.split, Split::kUnassigned);
      if (idea.split == Split::kTrain) {
        ASSERT_TRUE(idea.label.has_value());
      }
      if (!idea.label) {
        ASSERT_EQ(idea.split, Split::kTest);
      }
    }
  }
}

TEST(LabelDistribution, Examples) {
  Corpus c = labeled_corpus(4, 4);
  for (auto& idea : c.ideas) {
    idea.label = 0;
    idea.split = Split::kTrain;
  }
  EXPECT_EQ(label_distribution(c, Split::kTrain), (std::vector<double>{1, 0, 0, 0}));

  Corpus two = labeled_corpus(2, 2);
  for (auto& idea : two.ideas) idea.split = Split::kTest;
  EXPECT_EQ(label_distribution(two, Split::kTest), (std::vector<double>{0.5, 0.5}));
}

TEST(LabelDistribution, TableSixShape) {
  Corpus c = labeled_corpus(20, 4);
  const std::size_t counts[] = {11, 5, 2, 2};
  std::size_t i = 0;
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t k = 0; k < counts[l]; ++k, ++i) {
      c.ideas[i].label = l;
      c.ideas[i].split = Split::kTrain;
    }
  const auto d = label_distribution(c, Split::kTrain);
  EXPECT_NEAR(d[0], 0.55, 1e-12);
  EXPECT_NEAR(d[1], 0.25, 1e-12);
  EXPECT_NEAR(d[2], 0.10, 1e-12);
  EXPECT_NEAR(d[0] + d[1] + d[2] + d[3], 1.0, 1e-9);
}

TEST(LabelDistribution, UnlabeledIdeaIsNamed) {
  Corpus c = labeled_corpus(3, 2);
  for (auto& idea : c.ideas) idea.split = Split::kTest;
  c.ideas[1].label.reset();
  try {
    label_distribution(c, Split::kTest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("i1"), std::string::npos);
  }
  EXPECT_THROW(label_distribution(c, Split::kValidation), Error);
}
