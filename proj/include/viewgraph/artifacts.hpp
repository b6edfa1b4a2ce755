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

// File formats passed between pipeline stages.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/gnn.hpp"
#include "viewgraph/graph.hpp"
#include "viewgraph/label_prop.hpp"
#include "viewgraph/llm_client.hpp"

namespace viewgraph {

// One line of viewpoints.jsonl.
struct ViewpointRecord {
  std::string id;
  Split split = Split::kUnassigned;
  std::int64_t timestamp = 0;
  std::vector<std::string> viewpoints;
  TokenUsage usage;
  std::vector<ViewpointPair> pairs;

  bool operator==(const ViewpointRecord&) const = default;
};

void save_viewpoints(const std::filesystem::path& path,
                     const std::vector<ViewpointRecord>& records);
std::vector<ViewpointRecord> load_viewpoints(const std::filesystem::path& path);

std::vector<IdeaViewpoints> to_idea_viewpoints(const std::vector<ViewpointRecord>& records);

// Embedding row ids: "<idea>#<viewpoint index>".
std::vector<std::string> viewpoint_row_ids(const std::vector<ViewpointRecord>& records);

// {id, label, vector, unreached}
void save_lp_predictions(const std::filesystem::path& path,
                         const std::vector<LpPrediction>& predictions,
                         const LabelSet& labels);
// {id, label, probabilities}
void save_gnn_predictions(const std::filesystem::path& path,
                          const std::vector<SubgraphPrediction>& predictions,
                          const LabelSet& labels);

struct PredictedLabel {
  std::string id;
  std::size_t label = 0;
};

// Reads the id and label of either prediction format.
std::vector<PredictedLabel> load_predicted_labels(const std::filesystem::path& path,
                                                  const LabelSet& labels);

void save_train_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

// Predicted labels joined with the corpus truths. Ids that are unknown or
// unlabeled in the corpus are skipped and counted.
struct EvaluationInput {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> truths;
  std::size_t skipped = 0;
};

EvaluationInput join_with_truths(const std::vector<PredictedLabel>& predictions,
                                 const Corpus& corpus);

}  // namespace viewgraph
