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

#include "viewgraph/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "viewgraph/error.hpp"

using namespace viewgraph;

namespace {

using Labels = std::vector<std::size_t>;

MetricReport report(const Labels& truth, const Labels& pred, std::size_t labels) {
  return macro_metrics(confusion(pred, truth, labels));
}

}  // namespace

TEST(Confusion, Tally) {
  const Labels truth = {0, 0, 1}, pred = {0, 1, 1};
  const auto m = confusion(pred, truth, 2);
  EXPECT_EQ(m.at(0, 0), 1u);
  EXPECT_EQ(m.at(0, 1), 1u);
  EXPECT_EQ(m.at(1, 1), 1u);
  EXPECT_EQ(m.at(1, 0), 0u);
  EXPECT_EQ(m.total(), 3u);
  EXPECT_EQ(m.trace(), 2u);
}

TEST(Confusion, PerfectIsDiagonal) {
  const Labels l = {0, 1, 2, 2, 1};
  const auto m = confusion(l, l, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_EQ(m.at(i, j), 0u);
      }
  const auto r = macro_metrics(m);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.macro_precision, 1.0);
  EXPECT_EQ(r.macro_recall, 1.0);
}

TEST(Confusion, Errors) {
  const Labels a = {0, 1}, b = {0}, empty = {}, out = {0, 5};
  EXPECT_THROW(confusion(a, b, 2), Error);
  EXPECT_THROW(confusion(empty, empty, 2), Error);
  EXPECT_THROW(confusion(out, a, 2), Error);
}

TEST(MacroMetrics, TwoClassHandExample) {
  const auto r = report({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 0.5);
  EXPECT_NEAR(r.per_class[0].f1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.per_class[1].precision, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 1.0);
  EXPECT_NEAR(r.per_class[1].f1, 0.8, 1e-15);
  EXPECT_NEAR(r.macro_f1, 11.0 / 15.0, 1e-15);
  EXPECT_EQ(r.per_class[0].support, 2u);
}

TEST(MacroMetrics, AbsentClassCountsAsZero) {
  const auto r = report({0, 1, 2, 3}, {0, 1, 3, 3}, 4);
  EXPECT_EQ(r.per_class[2].precision, 0.0);
  EXPECT_EQ(r.per_class[2].recall, 0.0);
  EXPECT_EQ(r.per_class[2].f1, 0.0);
  double sum = 0;
  for (const auto& c : r.per_class) sum += c.f1;
  EXPECT_NEAR(r.macro_f1, sum / 4.0, 1e-15);
}

TEST(MacroMetrics, BruteForceOracleProperty) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t labels = 2 + gen() % 4;
    const std::size_t n = 1 + gen() % 40;
    Labels truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = gen() % labels;
      pred[i] = gen() % 3 == 0 ? truth[i] : gen() % labels;
    }
    const auto r = report(truth, pred, labels);
    const auto o = oracle::brute_force_metrics(truth, pred, labels);
    ASSERT_NEAR(r.accuracy, o.accuracy, 1e-12);
    ASSERT_NEAR(r.macro_precision, o.macro_p, 1e-12);
    ASSERT_NEAR(r.macro_recall, o.macro_r, 1e-12);
    ASSERT_NEAR(r.macro_f1, o.macro_f1, 1e-12);
    for (std::size_t c = 0; c < labels; ++c) ASSERT_NEAR(r.per_class[c].f1, o.f1[c], 1e-12);
    for (double v : {r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(MacroMetrics, RelabelingInvarianceProperty) {
  std::mt19937_64 gen(24);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t labels = 2 + gen() % 4;
    Labels perm(labels);
    for (std::size_t i = 0; i < labels; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    const std::size_t n = 1 + gen() % 30;
    Labels truth(n), pred(n), pt(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = gen() % labels;
      pred[i] = gen() % labels;
      pt[i] = perm[truth[i]];
      pp[i] = perm[pred[i]];
    }
    const auto a = report(truth, pred, labels), b = report(pt, pp, labels);
    ASSERT_NEAR(a.macro_f1, b.macro_f1, 1e-12);
    ASSERT_NEAR(a.macro_precision, b.macro_precision, 1e-12);
    ASSERT_NEAR(a.macro_recall, b.macro_recall, 1e-12);
    ASSERT_EQ(a.accuracy, b.accuracy);
  }
}

TEST(NormedCost, Examples) {
  EXPECT_EQ(normed_cost({{"A", 2.0}, {"B", 1.0}}), (std::map<std::string, double>{{"A", 1.0}, {"B", 0.5}}));
  EXPECT_EQ(normed_cost({{"only", 0.3}}).at("only"), 1.0);
  EXPECT_NEAR(normed_cost({{"big", 1.0}, {"ours", 0.08}}).at("ours"), 0.08, 1e-15);
  EXPECT_THROW(normed_cost({{"A", 0.0}, {"B", 0.0}}), Error);
}

TEST(Report, JsonAndTable) {
  auto r = report({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
  r.avg_token_cost = 0.5;
  r.normed_cost = 1.0;
  const auto j = report_to_json(r, LabelSet({"bad", "good"}));
  EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), 0.75);
  EXPECT_TRUE(j.dump().find("good") != std::string::npos);
  const auto table = format_report_table({{"lp", r}});
  for (const char* column : {"Method", "Accuracy", "Precision", "Recall", "F1 Score", "Token Cost", "Normed Cost"})
    EXPECT_NE(table.find(column), std::string::npos) << column;
  EXPECT_NE(table.find("lp"), std::string::npos);
}
