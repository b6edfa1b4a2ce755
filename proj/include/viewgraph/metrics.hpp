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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "viewgraph/dataset.hpp"

namespace viewgraph {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t labels)
      : labels_(labels), counts_(labels * labels, 0) {}

  std::size_t labels() const { return labels_; }
  // counts[truth][predicted]
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * labels_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted);
  std::size_t total() const;
  std::size_t trace() const;

 private:
  std::size_t labels_;
  std::vector<std::size_t> counts_;
};

// Throws on length mismatch, empty input or out-of-range labels.
ConfusionMatrix confusion(std::span<const std::size_t> predictions,
                          std::span<const std::size_t> truths,
                          std::size_t labels);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricReport {
  std::size_t evaluated = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::optional<double> avg_token_cost;
  std::optional<double> normed_cost;
};

// Zero-denominator precision/recall/F1 are 0; every label of the set enters
// the unweighted macro mean, present in the data or not.
MetricReport macro_metrics(const ConfusionMatrix& matrix);

// Divides each cost by the maximum. Throws when no cost is positive.
std::map<std::string, double> normed_cost(const std::map<std::string, double>& costs);

nlohmann::json report_to_json(const MetricReport& report, const LabelSet& labels);

// Aligned text table, columns: Method, Accuracy, Precision, Recall, F1 Score,
// Token Cost, Normed Cost.
std::string format_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace viewgraph
