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

#include "viewgraph/pipeline.hpp"

#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

#include "viewgraph/artifacts.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/hashing.hpp"
#include "viewgraph/metrics.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Collects typed values from one config section and records every problem
// with its dotted path instead of stopping at the first.
class SectionReader {
 public:
  SectionReader(const json& doc, std::string name, std::vector<ConfigIssue>& errors)
      : name_(std::move(name)), errors_(errors) {
    if (!doc.contains(name_)) return;
    const json& value = doc.at(name_);
    if (!value.is_object()) {
      issue("", "must be an object");
      return;
    }
    section_ = &value;
  }

  ~SectionReader() = default;

  void allow(std::initializer_list<const char*> keys) {
    if (section_ == nullptr) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : section_->items()) {
      if (allowed.count(key) == 0) issue(key, "unknown key");
    }
  }

  template <typename T>
  T get(const char* key, T fallback) {
    if (section_ == nullptr || !section_->contains(key)) return fallback;
    const json& value = section_->at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!value.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!value.is_number_integer()) throw std::invalid_argument("expected an integer");
        if (std::is_unsigned_v<T> && value.get<std::int64_t>() < 0 &&
            !value.is_number_unsigned()) {
          throw std::invalid_argument("must be non-negative");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!value.is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value.is_string()) throw std::invalid_argument("expected a string");
      }
      return value.get<T>();
    } catch (const std::exception& e) {
      issue(key, e.what());
      return fallback;
    }
  }

  bool has(const char* key) const { return section_ != nullptr && section_->contains(key); }
  const json* raw(const char* key) const {
    return has(key) ? &section_->at(key) : nullptr;
  }

  void issue(const std::string& key, const std::string& message) {
    errors_.push_back({key.empty() ? name_ : name_ + "." + key, message});
  }

 private:
  std::string name_;
  std::vector<ConfigIssue>& errors_;
  const json* section_ = nullptr;
};

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

bool creatable(const fs::path& dir) {
  fs::path probe = fs::absolute(dir);
  while (!probe.empty() && !fs::exists(probe)) {
    if (probe == probe.parent_path()) return false;
    probe = probe.parent_path();
  }
  return fs::is_directory(probe);
}

}  // namespace

ConfigResult validate_config(const json& doc, const fs::path& base_dir, bool require_corpus) {
  ConfigResult result;
  auto& errors = result.errors;
  if (!doc.is_object()) {
    errors.push_back({"", "config must be a JSON object"});
    return result;
  }
  static const std::set<std::string> kSections = {"seed", "paths", "split", "llm", "embedding",
                                                  "graph", "lp", "gnn", "novelty", "methods"};
  for (const auto& [key, value] : doc.items()) {
    if (kSections.count(key) == 0) errors.push_back({key, "unknown key"});
  }

  RunConfig c;
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned() ||
        (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0)) {
      c.seed = doc["seed"].get<std::uint64_t>();
    } else {
      errors.push_back({"seed", "expected a non-negative integer"});
    }
  }

  {
    SectionReader r(doc, "paths", errors);
    r.allow({"corpus", "work_dir"});
    const auto corpus = r.get<std::string>("corpus", "");
    if (corpus.empty()) {
      if (require_corpus) r.issue("corpus", "is required");
    } else {
      c.corpus = resolve(base_dir, corpus);
      if (!fs::is_regular_file(c.corpus)) r.issue("corpus", "file does not exist: " + c.corpus.string());
    }
    c.work_dir = resolve(base_dir, r.get<std::string>("work_dir", "work"));
    if (!creatable(c.work_dir)) r.issue("work_dir", "cannot be created: " + c.work_dir.string());
  }

  {
    SectionReader r(doc, "split", errors);
    r.allow({"fractions"});
    if (const json* f = r.raw("fractions")) {
      if (!f->is_array() || f->size() != 3 ||
          !std::all_of(f->begin(), f->end(), [](const json& x) { return x.is_number(); })) {
        r.issue("fractions", "expected [train, validation, test]");
      } else {
        c.split = {(*f)[0].get<double>(), (*f)[1].get<double>(), (*f)[2].get<double>()};
        try {
          validate_fractions(c.split);
        } catch (const std::exception& e) {
          r.issue("fractions", e.what());
        }
      }
    }
  }

  {
    SectionReader r(doc, "llm", errors);
    r.allow({"backend", "endpoint", "model", "temperature", "price_per_million", "max_in_flight",
             "max_retries", "backoff_seconds", "timeout_seconds", "relations"});
    const auto backend = r.get<std::string>("backend", "mock");
    if (backend == "mock") {
      c.llm.kind = BackendKind::kMock;
    } else if (backend == "remote") {
      c.llm.kind = BackendKind::kRemote;
    } else {
      r.issue("backend", "expected \"mock\" or \"remote\"");
    }
    c.llm.endpoint = r.get<std::string>("endpoint", "");
    c.llm.model = r.get<std::string>("model", "");
    c.llm.temperature = r.get<double>("temperature", 0.1);
    if (!(c.llm.temperature >= 0.0 && c.llm.temperature <= 2.0)) {
      r.issue("temperature", "must lie in [0, 2]");
    }
    c.llm.price_per_million = r.get<double>("price_per_million", 0.20);
    if (c.llm.price_per_million < 0.0) r.issue("price_per_million", "must be non-negative");
    c.llm.max_in_flight = r.get<std::size_t>("max_in_flight", 4);
    if (c.llm.max_in_flight < 1) r.issue("max_in_flight", "must be at least 1");
    c.llm.retry.max_retries = r.get<int>("max_retries", 3);
    if (c.llm.retry.max_retries < 0) r.issue("max_retries", "must be non-negative");
    c.llm.retry.initial_backoff_seconds = r.get<double>("backoff_seconds", 1.0);
    c.llm.retry.timeout_seconds = r.get<double>("timeout_seconds", 60.0);
    if (!(c.llm.retry.timeout_seconds > 0.0)) r.issue("timeout_seconds", "must be positive");
    c.relations = r.get<bool>("relations", false);
    if (c.llm.kind == BackendKind::kRemote && c.llm.endpoint.empty()) {
      r.issue("endpoint", "is required for the remote backend");
    }
  }

  {
    SectionReader r(doc, "embedding", errors);
    r.allow({"backend", "dimension", "endpoint", "model", "batch_size"});
    const auto backend = r.get<std::string>("backend", "stub");
    if (backend == "stub") {
      c.embedding.backend = EmbeddingBackend::kStub;
    } else if (backend == "remote") {
      c.embedding.backend = EmbeddingBackend::kRemote;
    } else {
      r.issue("backend", "expected \"stub\" or \"remote\"");
    }
    auto& remote = c.embedding.remote;
    remote.dimension = r.get<std::size_t>("dimension", 32);
    if (remote.dimension < 1) r.issue("dimension", "must be at least 1");
    remote.endpoint = r.get<std::string>("endpoint", "");
    remote.model = r.get<std::string>("model", "");
    remote.batch_size = r.get<std::size_t>("batch_size", 64);
    if (remote.batch_size < 1) r.issue("batch_size", "must be at least 1");
    remote.retry = c.llm.retry;
    if (c.embedding.backend == EmbeddingBackend::kRemote && remote.endpoint.empty()) {
      r.issue("endpoint", "is required for the remote backend");
    }
  }

  {
    SectionReader r(doc, "graph", errors);
    r.allow({"k", "m", "weight_floor"});
    c.graph.intra_degree = r.get<std::size_t>("k", 5);
    if (c.graph.intra_degree < 1) r.issue("k", "must be at least 1");
    c.graph.inter_degree = r.get<std::size_t>("m", 10);
    c.graph.weight_floor = r.get<double>("weight_floor", 0.0);
    if (!(c.graph.weight_floor >= 0.0 && c.graph.weight_floor <= 1.0)) {
      r.issue("weight_floor", "must lie in [0, 1]");
    }
  }

  {
    SectionReader r(doc, "lp", errors);
    r.allow({"max_iterations", "early_stop"});
    c.lp.max_iterations = r.get<std::size_t>("max_iterations", 5);
    if (c.lp.max_iterations < 1) r.issue("max_iterations", "must be at least 1");
    c.lp.early_stop = r.get<bool>("early_stop", true);
  }

  {
    SectionReader r(doc, "gnn", errors);
    r.allow({"layers", "hidden", "batch_size", "epochs", "learning_rate", "class_weights"});
    c.gnn.layers = r.get<std::size_t>("layers", 2);
    if (c.gnn.layers < 1) r.issue("layers", "must be at least 1");
    c.gnn.hidden = r.get<std::size_t>("hidden", 64);
    if (c.gnn.hidden < 1) r.issue("hidden", "must be at least 1");
    c.gnn.batch_size = r.get<std::size_t>("batch_size", 64);
    if (c.gnn.batch_size < 1) r.issue("batch_size", "must be at least 1");
    c.gnn.max_epochs = r.get<std::size_t>("epochs", 1000);
    if (c.gnn.max_epochs < 1) r.issue("epochs", "must be at least 1");
    c.gnn.learning_rate = r.get<double>("learning_rate", 1e-3);
    if (!(c.gnn.learning_rate > 0.0)) r.issue("learning_rate", "must be positive");
    c.gnn.class_weights = r.get<bool>("class_weights", false);
  }

  {
    SectionReader r(doc, "novelty", errors);
    r.allow({"enabled", "count", "train_subset", "swap_fraction", "min_source_label",
             "negative_label", "strategies"});
    auto& n = c.novelty;
    n.enabled = r.get<bool>("enabled", false);
    n.options.count = r.get<std::size_t>("count", 80);
    if (n.options.count < 1) r.issue("count", "must be at least 1");
    n.options.train_subset = r.get<std::size_t>("train_subset", 10);
    if (n.options.train_subset > n.options.count) r.issue("train_subset", "exceeds novelty.count");
    n.options.swap_fraction = r.get<double>("swap_fraction", 0.5);
    if (!(n.options.swap_fraction > 0.0 && n.options.swap_fraction <= 1.0)) {
      r.issue("swap_fraction", "must lie in (0, 1]");
    }
    n.options.min_source_label = r.get<std::size_t>("min_source_label", 1);
    n.options.negative_label = r.get<std::size_t>("negative_label", 0);
    if (const json* s = r.raw("strategies")) {
      n.options.strategies.clear();
      if (!s->is_array() || s->empty()) {
        r.issue("strategies", "expected a non-empty list");
      } else {
        for (const auto& item : *s) {
          try {
            n.options.strategies.push_back(parse_plagiarism(item.get<std::string>()));
          } catch (const std::exception& e) {
            r.issue("strategies", e.what());
          }
        }
      }
    }
  }

  if (doc.contains("methods")) {
    const json& m = doc["methods"];
    c.methods.clear();
    if (!m.is_array() || m.empty()) {
      errors.push_back({"methods", "expected a non-empty list"});
    } else {
      for (const auto& item : m) {
        if (!item.is_string() || (item != "lp" && item != "gnn")) {
          errors.push_back({"methods", "each method must be \"lp\" or \"gnn\""});
        } else if (std::find(c.methods.begin(), c.methods.end(), item.get<std::string>()) ==
                   c.methods.end()) {
          c.methods.push_back(item.get<std::string>());
        }
      }
    }
  }
  if (c.novelty.enabled &&
      std::find(c.methods.begin(), c.methods.end(), "gnn") == c.methods.end()) {
    errors.push_back({"novelty.enabled", "negatives are only used by the gnn method"});
  }

  if (errors.empty()) result.config = std::move(c);
  return result;
}

ConfigResult validate_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return {std::nullopt, {{"", "cannot open " + path.string()}}};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    return {std::nullopt, {{"", std::string("invalid JSON: ") + e.what()}}};
  }
  return validate_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json config_to_json(const RunConfig& c) {
  json strategies = json::array();
  for (auto k : c.novelty.options.strategies) strategies.push_back(plagiarism_name(k));
  return {
      {"seed", c.seed},
      {"paths", {{"corpus", c.corpus.string()}, {"work_dir", c.work_dir.string()}}},
      {"split", {{"fractions", {c.split.train, c.split.validation, c.split.test}}}},
      {"llm",
       {{"backend", c.llm.kind == BackendKind::kMock ? "mock" : "remote"},
        {"endpoint", c.llm.endpoint},
        {"model", c.llm.model},
        {"temperature", c.llm.temperature},
        {"price_per_million", c.llm.price_per_million},
        {"max_in_flight", c.llm.max_in_flight},
        {"max_retries", c.llm.retry.max_retries},
        {"backoff_seconds", c.llm.retry.initial_backoff_seconds},
        {"timeout_seconds", c.llm.retry.timeout_seconds},
        {"relations", c.relations}}},
      {"embedding",
       {{"backend", c.embedding.backend == EmbeddingBackend::kStub ? "stub" : "remote"},
        {"dimension", c.embedding.remote.dimension},
        {"endpoint", c.embedding.remote.endpoint},
        {"model", c.embedding.remote.model},
        {"batch_size", c.embedding.remote.batch_size}}},
      {"graph",
       {{"k", c.graph.intra_degree}, {"m", c.graph.inter_degree},
        {"weight_floor", c.graph.weight_floor}}},
      {"lp", {{"max_iterations", c.lp.max_iterations}, {"early_stop", c.lp.early_stop}}},
      {"gnn",
       {{"layers", c.gnn.layers},
        {"hidden", c.gnn.hidden},
        {"batch_size", c.gnn.batch_size},
        {"epochs", c.gnn.max_epochs},
        {"learning_rate", c.gnn.learning_rate},
        {"class_weights", c.gnn.class_weights}}},
      {"novelty",
       {{"enabled", c.novelty.enabled},
        {"count", c.novelty.options.count},
        {"train_subset", c.novelty.options.train_subset},
        {"swap_fraction", c.novelty.options.swap_fraction},
        {"min_source_label", c.novelty.options.min_source_label},
        {"negative_label", c.novelty.options.negative_label},
        {"strategies", strategies}}},
      {"methods", c.methods}};
}

std::uint64_t stage_seed(const RunConfig& config, std::string_view stage) {
  return derive_seed(config.seed, stage);
}

bool RunManifest::succeeded() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageRecord& s) {
    return s.status == "ok" || s.status == "skipped";
  });
}

json RunManifest::to_json() const {
  json list = json::array();
  for (const auto& s : stages) {
    list.push_back({{"name", s.name},
                    {"key", s.key},
                    {"inputs", s.inputs},
                    {"outputs", s.outputs},
                    {"wall_seconds", s.wall_seconds},
                    {"status", s.status},
                    {"error", s.error}});
  }
  return {{"tool_version", tool_version},
          {"config", config},
          {"stages", list},
          {"tokens",
           {{"prompt", prompt_tokens},
            {"completion", completion_tokens},
            {"total", prompt_tokens + completion_tokens}}}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.config = j.at("config");
  for (const auto& s : j.at("stages")) {
    StageRecord r;
    r.name = s.at("name").get<std::string>();
    r.key = s.at("key").get<std::string>();
    r.inputs = s.at("inputs");
    r.outputs = s.at("outputs");
    r.wall_seconds = s.at("wall_seconds").get<double>();
    r.status = s.at("status").get<std::string>();
    r.skipped = r.status == "skipped";
    r.error = s.value("error", "");
    m.stages.push_back(std::move(r));
  }
  m.prompt_tokens = j.at("tokens").at("prompt").get<std::int64_t>();
  m.completion_tokens = j.at("tokens").at("completion").get<std::int64_t>();
  return m;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingSettings& settings) {
  if (settings.backend == EmbeddingBackend::kStub) {
    return std::make_unique<StubEmbeddingProvider>(settings.remote.dimension);
  }
  return std::make_unique<RemoteEmbeddingProvider>(settings.remote);
}

EvaluationReport evaluate_methods(
    const std::vector<std::pair<std::string, fs::path>>& predictions, const Corpus& corpus,
    const std::map<std::string, double>& costs) {
  std::optional<std::map<std::string, double>> normed;
  if (std::any_of(costs.begin(), costs.end(), [](const auto& kv) { return kv.second > 0.0; })) {
    normed = normed_cost(costs);
  }
  EvaluationReport out;
  out.json = {{"labels", corpus.labels.names()}, {"methods", json::object()}};
  std::vector<std::pair<std::string, MetricReport>> rows;
  for (const auto& [method, path] : predictions) {
    const auto joined = join_with_truths(load_predicted_labels(path, corpus.labels), corpus);
    if (joined.predicted.empty()) {
      throw Error("no labeled predictions to evaluate in " + path.string());
    }
    MetricReport report =
        macro_metrics(confusion(joined.predicted, joined.truths, corpus.labels.size()));
    if (const auto it = costs.find(method); it != costs.end()) report.avg_token_cost = it->second;
    if (normed) {
      if (const auto it = normed->find(method); it != normed->end()) {
        report.normed_cost = it->second;
      }
    }
    json entry = report_to_json(report, corpus.labels);
    entry["skipped"] = joined.skipped;
    out.json["methods"][method] = std::move(entry);
    rows.emplace_back(method, std::move(report));
  }
  out.table = format_report_table(rows);
  return out;
}

namespace {

class StageRunner {
 public:
  StageRunner(const RunConfig& config, const RunOptions& options)
      : config_(config), options_(options) {
    manifest_.config = config_to_json(config);
    const fs::path previous = config.work_dir / "manifest.json";
    if (fs::exists(previous)) {
      try {
        std::ifstream in(previous);
        previous_ = RunManifest::from_json(json::parse(in));
      } catch (const std::exception&) {
        previous_.reset();
      }
    }
  }

  // `settings` is the stage-relevant slice of the config; it enters the key
  // together with the sub-seed and the input hashes.
  void run(const std::string& name, const json& settings, const std::vector<std::string>& inputs,
           const std::vector<std::string>& outputs, const std::function<void()>& body) {
    StageRecord record;
    record.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      json key_material = {{"stage", name},
                           {"version", kToolVersion},
                           {"settings", settings},
                           {"seed", stage_seed(config_, name)}};
      for (const auto& input : inputs) {
        const fs::path p = resolve_input(input);
        record.inputs[input] = sha256_file(p);
      }
      key_material["inputs"] = record.inputs;
      record.key = sha256_hex(key_material.dump());

      if (!options_.force && cached(record, outputs)) {
        record.status = "skipped";
        record.skipped = true;
        log("skip  " + name);
      } else {
        log("run   " + name);
        body();
        for (const auto& output : outputs) {
          record.outputs[output] = sha256_file(config_.work_dir / output);
        }
        record.status = "ok";
      }
    } catch (const std::exception& e) {
      record.status = "failed";
      record.error = e.what();
      record.wall_seconds = elapsed(start);
      manifest_.stages.push_back(record);
      write_manifest();
      throw Error("stage " + name + " failed: " + e.what());
    }
    record.wall_seconds = elapsed(start);
    manifest_.stages.push_back(std::move(record));
  }

  RunManifest& manifest() { return manifest_; }
  fs::path path(const std::string& name) const { return config_.work_dir / name; }

  void write_manifest() const {
    std::ofstream out(config_.work_dir / "manifest.json");
    out << manifest_.to_json().dump(2) << '\n';
  }

 private:
  fs::path resolve_input(const std::string& input) const {
    return input == "corpus" ? config_.corpus : config_.work_dir / input;
  }

  bool cached(StageRecord& record, const std::vector<std::string>& outputs) const {
    if (!previous_) return false;
    for (const auto& prior : previous_->stages) {
      if (prior.name != record.name) continue;
      if (prior.key != record.key || (prior.status != "ok" && prior.status != "skipped")) {
        return false;
      }
      for (const auto& output : outputs) {
        const fs::path p = config_.work_dir / output;
        if (!prior.outputs.contains(output) || !fs::exists(p) ||
            prior.outputs[output].get<std::string>() != sha256_file(p)) {
          return false;
        }
      }
      record.outputs = prior.outputs;
      return true;
    }
    return false;
  }

  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void log(const std::string& line) const {
    if (!options_.quiet) std::cerr << line << '\n';
  }

  const RunConfig& config_;
  RunOptions options_;
  RunManifest manifest_;
  std::optional<RunManifest> previous_;
};

bool wants(const RunConfig& c, const char* method) {
  return std::find(c.methods.begin(), c.methods.end(), method) != c.methods.end();
}

}  // namespace

RunManifest run_pipeline(const RunConfig& config, const RunOptions& options) {
  fs::create_directories(config.work_dir);
  StageRunner runner(config, options);
  const json snapshot = config_to_json(config);

  runner.run("split", snapshot["split"], {"corpus"}, {"split.jsonl"}, [&] {
    const Corpus corpus = load_corpus(config.corpus);
    save_corpus(split_corpus(corpus, config.split, stage_seed(config, "split")),
                runner.path("split.jsonl"));
  });

  json llm_settings = snapshot["llm"];
  llm_settings.erase("max_in_flight");
  runner.run("extract", llm_settings, {"split.jsonl"}, {"viewpoints.jsonl"}, [&] {
    const Corpus corpus = load_corpus(runner.path("split.jsonl"));
    LlmBackendConfig llm = config.llm;
    llm.mock_seed = stage_seed(config, "extract");
    const auto backend = make_chat_backend(llm);
    std::vector<const Idea*> ideas;
    for (const auto& idea : corpus.ideas) ideas.push_back(&idea);
    const auto extracted = extract_viewpoints_batch(
        ideas, *backend, PromptTemplate::viewpoint_extraction(), llm.max_in_flight);
    std::vector<ViewpointRecord> records;
    for (std::size_t i = 0; i < ideas.size(); ++i) {
      ViewpointRecord r{ideas[i]->id, ideas[i]->split, ideas[i]->timestamp,
                        extracted[i].viewpoints, extracted[i].usage, {}};
      if (config.relations && r.viewpoints.size() >= 2) {
        const auto rel = extract_relations(r.viewpoints, *ideas[i], *backend,
                                           PromptTemplate::relation_extraction());
        r.pairs = rel.pairs;
        r.usage.prompt_tokens += rel.usage.prompt_tokens;
        r.usage.completion_tokens += rel.usage.completion_tokens;
      }
      records.push_back(std::move(r));
    }
    save_viewpoints(runner.path("viewpoints.jsonl"), records);
  });
  {
    for (const auto& r : load_viewpoints(runner.path("viewpoints.jsonl"))) {
      runner.manifest().prompt_tokens += r.usage.prompt_tokens;
      runner.manifest().completion_tokens += r.usage.completion_tokens;
    }
  }

  runner.run("embed", snapshot["embedding"], {"viewpoints.jsonl"}, {"embeddings.bin"}, [&] {
    const auto records = load_viewpoints(runner.path("viewpoints.jsonl"));
    std::vector<std::string> texts;
    for (const auto& r : records) texts.insert(texts.end(), r.viewpoints.begin(), r.viewpoints.end());
    const auto provider = make_embedding_provider(config.embedding);
    save_embeddings(runner.path("embeddings.bin"), viewpoint_row_ids(records),
                    embed(texts, *provider));
  });

  runner.run("build", snapshot["graph"], {"viewpoints.jsonl", "embeddings.bin"}, {"graph.json"},
             [&] {
               const auto records = load_viewpoints(runner.path("viewpoints.jsonl"));
               const auto file = load_embeddings(runner.path("embeddings.bin"));
               if (file.ids != viewpoint_row_ids(records)) {
                 throw Error("embedding ids do not match the viewpoints file");
               }
               save_graph(build_graph(to_idea_viewpoints(records), file.matrix, config.graph),
                          runner.path("graph.json"));
             });

  std::vector<std::pair<std::string, fs::path>> prediction_files;
  if (wants(config, "lp")) {
    runner.run("lp", snapshot["lp"], {"split.jsonl", "graph.json"}, {"lp_predictions.jsonl"},
               [&] {
                 const Corpus corpus = load_corpus(runner.path("split.jsonl"));
                 const auto predictions = run_label_propagation(
                     load_graph(runner.path("graph.json")), corpus, config.lp, Split::kTest);
                 save_lp_predictions(runner.path("lp_predictions.jsonl"), predictions,
                                     corpus.labels);
               });
    prediction_files.emplace_back("lp", runner.path("lp_predictions.jsonl"));
  }

  if (wants(config, "gnn")) {
    std::vector<std::string> train_inputs = {"split.jsonl", "graph.json"};
    if (config.novelty.enabled) {
      runner.run("negatives", snapshot["novelty"], {"split.jsonl", "graph.json"},
                 {"negatives.jsonl"}, [&] {
                   const Corpus corpus = load_corpus(runner.path("split.jsonl"));
                   NegativeOptions opts = config.novelty.options;
                   opts.seed = stage_seed(config, "negatives");
                   const auto set =
                       generate_negatives(corpus, load_graph(runner.path("graph.json")), opts);
                   save_negatives(runner.path("negatives.jsonl"), set.samples, corpus.labels);
                 });
      train_inputs.push_back("negatives.jsonl");
    }
    const auto training_graph = [&](const Corpus& corpus) {
      ViewpointGraph graph = load_graph(runner.path("graph.json"));
      std::vector<NegativeSample> negatives;
      if (config.novelty.enabled) {
        negatives = load_negatives(runner.path("negatives.jsonl"), corpus.labels);
        graph = inject_negatives(graph, negatives, config.graph);
      }
      return std::make_pair(std::move(graph), std::move(negatives));
    };

    runner.run("train", json{{"gnn", snapshot["gnn"]}, {"graph", snapshot["graph"]}},
               train_inputs, {"model.ckpt", "train_log.jsonl"}, [&] {
                 const Corpus corpus = load_corpus(runner.path("split.jsonl"));
                 const auto [graph, negatives] = training_graph(corpus);
                 GnnConfig gnn = config.gnn;
                 gnn.seed = stage_seed(config, "train");
                 const TrainResult result = train(gnn, graph, corpus, negatives);
                 save_checkpoint(runner.path("model.ckpt"),
                                 {result.model, result.best_epoch,
                                  result.best_validation_macro_f1});
                 save_train_log(runner.path("train_log.jsonl"), result.log);
               });

    std::vector<std::string> predict_inputs = train_inputs;
    predict_inputs.push_back("model.ckpt");
    runner.run("predict", json::object(), predict_inputs, {"gnn_predictions.jsonl"}, [&] {
      const Corpus corpus = load_corpus(runner.path("split.jsonl"));
      const auto [graph, negatives] = training_graph(corpus);
      const Checkpoint checkpoint = load_checkpoint(runner.path("model.ckpt"));
      save_gnn_predictions(runner.path("gnn_predictions.jsonl"),
                           predict_split(checkpoint.model, graph, Split::kTest), corpus.labels);
    });
    prediction_files.emplace_back("gnn", runner.path("gnn_predictions.jsonl"));
  }

  std::vector<std::string> eval_inputs = {"split.jsonl", "viewpoints.jsonl"};
  for (const auto& [method, path] : prediction_files) eval_inputs.push_back(path.filename());
  runner.run("eval", json{{"methods", config.methods}}, eval_inputs, {"report.json", "report.txt"},
             [&] {
               const Corpus corpus = load_corpus(runner.path("split.jsonl"));
               std::vector<TokenUsage> usages;
               for (const auto& r : load_viewpoints(runner.path("viewpoints.jsonl"))) {
                 usages.push_back(r.usage);
               }
               const double cost = token_cost(usages).avg_cost;
               std::map<std::string, double> costs;
               for (const auto& [method, path] : prediction_files) costs[method] = cost;
               const EvaluationReport report = evaluate_methods(prediction_files, corpus, costs);
               std::ofstream(runner.path("report.json")) << report.json.dump(2) << '\n';
               std::ofstream(runner.path("report.txt")) << report.table;
             });

  runner.write_manifest();
  return runner.manifest();
}

}  // namespace viewgraph
