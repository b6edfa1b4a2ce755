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

// End-to-end runs driven by one JSON config file. Stages execute in order
// inside a work directory and are skipped when their content-hash cache key
// is unchanged and their recorded outputs are intact.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "viewgraph/dataset.hpp"
#include "viewgraph/embedding.hpp"
#include "viewgraph/gnn.hpp"
#include "viewgraph/graph.hpp"
#include "viewgraph/label_prop.hpp"
#include "viewgraph/llm_client.hpp"
#include "viewgraph/novelty.hpp"

namespace viewgraph {

inline constexpr const char* kToolVersion = "0.1.0";

enum class EmbeddingBackend { kStub, kRemote };

struct EmbeddingSettings {
  EmbeddingBackend backend = EmbeddingBackend::kStub;
  RemoteEmbeddingConfig remote;  // dimension is shared with the stub
};

struct NoveltySettings {
  bool enabled = false;
  NegativeOptions options;  // seed is derived from the global seed
};

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path work_dir = "work";
  SplitFractions split;
  LlmBackendConfig llm;
  bool relations = false;
  EmbeddingSettings embedding;
  GraphConfig graph;
  LpConfig lp;
  GnnConfig gnn;  // seed is derived from the global seed
  NoveltySettings novelty;
  std::vector<std::string> methods = {"lp", "gnn"};
  std::uint64_t seed = 0;
};

struct ConfigIssue {
  std::string path;  // e.g. "graph.k"
  std::string message;
};

struct ConfigResult {
  std::optional<RunConfig> config;
  std::vector<ConfigIssue> errors;
};

// Relative paths resolve against `base_dir`. Single-stage commands pass
// require_corpus = false since they name their inputs on the command line.
ConfigResult validate_config(const nlohmann::json& doc,
                             const std::filesystem::path& base_dir = ".",
                             bool require_corpus = true);
ConfigResult validate_config_file(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);

// Per-stage sub-seeds, all derived from the global seed.
std::uint64_t stage_seed(const RunConfig& config, std::string_view stage);

struct StageRecord {
  std::string name;
  std::string key;
  nlohmann::json inputs = nlohmann::json::object();   // file -> sha256
  nlohmann::json outputs = nlohmann::json::object();  // file -> sha256
  double wall_seconds = 0.0;
  bool skipped = false;
  std::string status = "pending";  // ok | skipped | failed
  std::string error;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  nlohmann::json config;
  std::vector<StageRecord> stages;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  bool succeeded() const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

struct RunOptions {
  bool force = false;
  bool quiet = false;
};

// Writes work_dir/manifest.json even when a stage fails; the failure is then
// rethrown with the stage name.
RunManifest run_pipeline(const RunConfig& config, const RunOptions& options = {});

// Building blocks shared with the CLI subcommands.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings);

// JSON report for several methods plus the aligned table.
struct EvaluationReport {
  nlohmann::json json;
  std::string table;
};

// `predictions` maps method name to prediction file. `costs` maps method name
// to average per-idea cost; normed costs are filled in when any is positive.
EvaluationReport evaluate_methods(
    const std::vector<std::pair<std::string, std::filesystem::path>>& predictions,
    const Corpus& corpus, const std::map<std::string, double>& costs);

}  // namespace viewgraph
