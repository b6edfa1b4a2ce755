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

#include <fmt/format.h>

#include <algorithm>

#include "viewgraph/error.hpp"

namespace viewgraph {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= labels_ || predicted >= labels_) {
    throw Error("confusion: label index out of range");
  }
  ++counts_[truth * labels_ + predicted];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < labels_; ++i) sum += at(i, i);
  return sum;
}

ConfusionMatrix confusion(std::span<const std::size_t> predictions,
                          std::span<const std::size_t> truths,
                          std::size_t labels) {
  if (predictions.size() != truths.size()) {
    throw Error("confusion: " + std::to_string(predictions.size()) +
                " predictions vs " + std::to_string(truths.size()) + " truths");
  }
  if (predictions.empty()) throw Error("confusion: no predictions");
  ConfusionMatrix matrix(labels);
  for (std::size_t i = 0; i < truths.size(); ++i) matrix.add(truths[i], predictions[i]);
  return matrix;
}

MetricReport macro_metrics(const ConfusionMatrix& matrix) {
  const std::size_t total = matrix.total();
  if (total == 0) throw Error("macro_metrics: empty confusion matrix");
  const std::size_t n = matrix.labels();
  MetricReport report;
  report.evaluated = total;
  report.accuracy = static_cast<double>(matrix.trace()) / static_cast<double>(total);
  report.per_class.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted += matrix.at(k, c);
      actual += matrix.at(c, k);
    }
    const double tp = static_cast<double>(matrix.at(c, c));
    auto& m = report.per_class[c];
    m.support = actual;
    m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? tp / static_cast<double>(actual) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
  }
  report.macro_precision /= static_cast<double>(n);
  report.macro_recall /= static_cast<double>(n);
  report.macro_f1 /= static_cast<double>(n);
  return report;
}

std::map<std::string, double> normed_cost(const std::map<std::string, double>& costs) {
  double highest = 0.0;
  for (const auto& [name, cost] : costs) {
    if (cost < 0.0) throw Error("normed_cost: negative cost for " + name);
    highest = std::max(highest, cost);
  }
  if (!(highest > 0.0)) throw Error("normed_cost: all costs are zero");
  std::map<std::string, double> out;
  for (const auto& [name, cost] : costs) out[name] = cost / highest;
  return out;
}

nlohmann::json report_to_json(const MetricReport& report, const LabelSet& labels) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    per_class.push_back({{"label", labels.name(c)},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  nlohmann::json out = {{"evaluated", report.evaluated},
                        {"accuracy", report.accuracy},
                        {"macro_precision", report.macro_precision},
                        {"macro_recall", report.macro_recall},
                        {"macro_f1", report.macro_f1},
                        {"per_class", std::move(per_class)}};
  out["avg_token_cost"] =
      report.avg_token_cost ? nlohmann::json(*report.avg_token_cost) : nlohmann::json();
  out["normed_cost"] =
      report.normed_cost ? nlohmann::json(*report.normed_cost) : nlohmann::json();
  return out;
}

std::string format_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::size_t name_width = 6;
  for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>9}  {:>8}  {:>8}  {:>10}  {:>11}\n",
                                "Method", name_width, "Accuracy", "Precision",
                                "Recall", "F1 Score", "Token Cost", "Normed Cost");
  for (const auto& [name, r] : rows) {
    const std::string cost =
        r.avg_token_cost ? fmt::format("{:.6f}", *r.avg_token_cost) : "-";
    const std::string normed = r.normed_cost ? fmt::format("{:.2f}", *r.normed_cost) : "-";
    out += fmt::format("{:<{}}  {:>7.2f}%  {:>8.2f}%  {:>7.2f}%  {:>7.2f}%  {:>10}  {:>11}\n",
                       name, name_width, 100.0 * r.accuracy, 100.0 * r.macro_precision,
                       100.0 * r.macro_recall, 100.0 * r.macro_f1, cost, normed);
  }
  return out;
}

}  // namespace viewgraph
