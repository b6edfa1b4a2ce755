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

#include "viewgraph/artifacts.hpp"

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.hpp"
#include "viewgraph/error.hpp"

using namespace viewgraph;

namespace {

std::vector<ViewpointRecord> sample_records() {
  ViewpointRecord a{"a", Split::kTrain, 5, {"one.", "two.", "three."}, {10, 20, 0.2}, {}};
  a.pairs.push_back({"one.", "however", Polarity::kOpposing, "three.", 0, 2});
  ViewpointRecord b{"b", Split::kTest, 9, {"solo."}, {3, 4, 0.2}, {}};
  return {a, b};
}

Corpus two_label_corpus() {
  Corpus c{LabelSet({"no", "yes"}), {}};
  c.ideas = {{"a", "", "x", 0, 0, Split::kTest},
             {"b", "", "x", 1, 0, Split::kTest},
             {"c", "", "x", std::nullopt, 0, Split::kTest}};
  return c;
}

}  // namespace

TEST(ViewpointsFile, RoundTrip) {
  testutil::TempDir dir;
  const auto records = sample_records();
  save_viewpoints(dir / "v.jsonl", records);
  EXPECT_EQ(load_viewpoints(dir / "v.jsonl"), records);
}

TEST(ViewpointsFile, BadLineReportsLineNumber) {
  testutil::TempDir dir;
  save_viewpoints(dir / "v.jsonl", sample_records());
  testutil::write_file(dir / "bad.jsonl", testutil::read_file(dir / "v.jsonl") + "[1, 2]\n");
  try {
    load_viewpoints(dir / "bad.jsonl");
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ViewpointsFile, GraphInputsAndRowIds) {
  const auto records = sample_records();
  const auto ideas = to_idea_viewpoints(records);
  ASSERT_EQ(ideas.size(), 2u);
  EXPECT_EQ(ideas[0].texts.size(), 3u);
  EXPECT_EQ(ideas[1].split, Split::kTest);
  EXPECT_EQ(ideas[1].timestamp, 9);
  EXPECT_EQ(viewpoint_row_ids(records), (std::vector<std::string>{"a#0", "a#1", "a#2", "b#0"}));
}

TEST(Predictions, BothFormatsLoadAsLabels) {
  testutil::TempDir dir;
  const LabelSet labels({"no", "yes"});
  save_lp_predictions(dir / "lp.jsonl", {{"a", {1, {0.2, 0.8}, false}}, {"b", {0, {0, 0}, true}}}, labels);
  save_gnn_predictions(dir / "gnn.jsonl", {{"a", {0.9, 0.1}, 0}, {"b", {0.3, 0.7}, 1}}, labels);
  const auto lp = load_predicted_labels(dir / "lp.jsonl", labels);
  ASSERT_EQ(lp.size(), 2u);
  EXPECT_EQ(lp[0].label, 1u);
  EXPECT_EQ(lp[1].label, 0u);
  const auto gnn = load_predicted_labels(dir / "gnn.jsonl", labels);
  EXPECT_EQ(gnn[1].id, "b");
  EXPECT_EQ(gnn[1].label, 1u);

  const auto line = nlohmann::json::parse(testutil::read_file(dir / "lp.jsonl").substr(
      0, testutil::read_file(dir / "lp.jsonl").find('\n')));
  EXPECT_EQ(line.at("label"), "yes");
  EXPECT_EQ(line.at("unreached"), false);
  EXPECT_THROW(load_predicted_labels(dir / "lp.jsonl", LabelSet({"p", "q"})), Error);
}

TEST(Predictions, JoinSkipsUnknownAndUnlabeled) {
  const auto joined = join_with_truths({{"a", 0}, {"b", 0}, {"c", 1}, {"zzz", 1}}, two_label_corpus());
  EXPECT_EQ(joined.predicted, (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(joined.truths, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(joined.skipped, 2u);
}

TEST(TrainLog, OneLinePerEpoch) {
  testutil::TempDir dir;
  save_train_log(dir / "log.jsonl", {{1, 1e-3, 0.7, 0.5, 0.4}, {2, 5e-4, 0.6, 0.75, std::nullopt}});
  const auto text = testutil::read_file(dir / "log.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(first.at("epoch"), 1);
}
