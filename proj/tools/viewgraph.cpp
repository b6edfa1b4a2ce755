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

// viewgraph: command-line front end for the viewpoint-graph pipeline.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "viewgraph/artifacts.hpp"
#include "viewgraph/dataset.hpp"
#include "viewgraph/embedding.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/gnn.hpp"
#include "viewgraph/graph.hpp"
#include "viewgraph/label_prop.hpp"
#include "viewgraph/llm_client.hpp"
#include "viewgraph/novelty.hpp"
#include "viewgraph/pipeline.hpp"
#include "viewgraph/synthetic.hpp"

namespace fs = std::filesystem;
using namespace viewgraph;

namespace {

constexpr const char* kApiKeyVariable = "VIEWGRAPH_API_KEY";

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool force = false;
  bool quiet = false;
};

void print_issues(const std::vector<ConfigIssue>& issues) {
  for (const auto& issue : issues) {
    std::cerr << "config error at " << (issue.path.empty() ? "<root>" : issue.path) << ": "
              << issue.message << '\n';
  }
}

// The config file when given, otherwise defaults. Subcommands only read the
// sections they need, so the corpus path is not required here.
RunConfig load_settings(const Globals& g) {
  RunConfig config;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw Error("cannot open " + g.config_path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    const fs::path base = fs::path(g.config_path).parent_path();
    auto result = validate_config(doc, base.empty() ? fs::path(".") : base, false);
    if (!result.config) {
      print_issues(result.errors);
      throw Error("invalid config " + g.config_path);
    }
    config = *result.config;
  }
  if (g.seed) config.seed = *g.seed;
  if (const char* key = std::getenv(kApiKeyVariable)) {
    config.llm.api_key = key;
    config.embedding.remote.api_key = key;
  }
  return config;
}

void note(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

SplitFractions parse_fractions(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw Error("--fractions: \"" + piece + "\" is not a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 3) throw Error("--fractions expects train,validation,test");
  SplitFractions f{values[0], values[1], values[2]};
  validate_fractions(f);
  return f;
}

Split parse_split_flag(const std::string& name) { return parse_split(name); }

ViewpointGraph graph_with_negatives(const std::string& graph_path, const std::string& negatives,
                                    const LabelSet& labels) {
  ViewpointGraph graph = load_graph(graph_path);
  if (!negatives.empty()) {
    graph = inject_negatives(graph, load_negatives(negatives, labels), graph.config());
  }
  return graph;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate research ideas with viewpoint-graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "Global seed");
  app.add_flag("--force", g.force, "Re-run cached stages");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  // split
  std::string split_in, split_out, fractions_text;
  auto* split_cmd = app.add_subcommand("split", "Assign train/validation/test splits");
  split_cmd->add_option("--in", split_in, "Corpus file")->required();
  split_cmd->add_option("--out", split_out, "Output corpus file")->required();
  split_cmd->add_option("--fractions", fractions_text, "train,validation,test");

  // extract
  std::string extract_in, extract_out, backend_name;
  bool with_relations = false;
  auto* extract_cmd = app.add_subcommand("extract", "Extract viewpoints with an LLM backend");
  extract_cmd->add_option("--in", extract_in, "Split corpus file")->required();
  extract_cmd->add_option("--out", extract_out, "Viewpoints file")->required();
  extract_cmd->add_option("--backend", backend_name, "mock or remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  extract_cmd->add_flag("--relations", with_relations, "Also extract viewpoint relations");

  // embed
  std::string embed_in, embed_out, provider_name;
  std::optional<std::size_t> embed_dim;
  auto* embed_cmd = app.add_subcommand("embed", "Embed every viewpoint");
  embed_cmd->add_option("--in", embed_in, "Viewpoints file")->required();
  embed_cmd->add_option("--out", embed_out, "Embedding file")->required();
  embed_cmd->add_option("--provider", provider_name, "stub or remote")
      ->check(CLI::IsMember({"stub", "remote"}));
  embed_cmd->add_option("--dim", embed_dim, "Embedding dimension")->check(CLI::PositiveNumber);

  // build
  std::string build_viewpoints, build_embeddings, build_out;
  std::optional<std::size_t> build_k, build_m;
  auto* build_cmd = app.add_subcommand("build", "Build the viewpoint-graph");
  build_cmd->add_option("--viewpoints", build_viewpoints, "Viewpoints file")->required();
  build_cmd->add_option("--embeddings", build_embeddings, "Embedding file")->required();
  build_cmd->add_option("--k", build_k, "Intra-idea degree");
  build_cmd->add_option("--m", build_m, "Inter-idea degree");
  build_cmd->add_option("--out", build_out, "Graph file")->required();

  // lp
  std::string lp_graph, lp_corpus, lp_out, lp_split = "test";
  std::optional<std::size_t> lp_iterations;
  std::optional<bool> lp_early_stop;
  auto* lp_cmd = app.add_subcommand("lp", "Label propagation predictions");
  lp_cmd->add_option("--graph", lp_graph, "Graph file")->required();
  lp_cmd->add_option("--corpus", lp_corpus, "Split corpus file")->required();
  lp_cmd->add_option("--max-iters", lp_iterations, "Propagation iterations");
  lp_cmd->add_flag("--early-stop,!--no-early-stop", lp_early_stop,
                   "Stop once no argmax changes");
  lp_cmd->add_option("--split", lp_split, "Split to predict");
  lp_cmd->add_option("--out", lp_out, "Predictions file")->required();

  // train
  std::string train_graph, train_corpus, train_negatives, train_out, train_log;
  std::optional<std::size_t> train_epochs;
  auto* train_cmd = app.add_subcommand("train", "Train the graph neural network");
  train_cmd->add_option("--graph", train_graph, "Graph file")->required();
  train_cmd->add_option("--corpus", train_corpus, "Split corpus file")->required();
  train_cmd->add_option("--negatives", train_negatives, "Negatives file");
  train_cmd->add_option("--epochs", train_epochs, "Maximum epochs");
  train_cmd->add_option("--log", train_log, "Per-epoch log file");
  train_cmd->add_option("--out", train_out, "Checkpoint file")->required();

  // predict
  std::string predict_model, predict_graph, predict_negatives, predict_out,
      predict_split_name = "test";
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a trained checkpoint");
  predict_cmd->add_option("--model", predict_model, "Checkpoint file")->required();
  predict_cmd->add_option("--graph", predict_graph, "Graph file")->required();
  predict_cmd->add_option("--negatives", predict_negatives,
                          "Negatives the model was trained with");
  predict_cmd->add_option("--split", predict_split_name, "Split to predict");
  predict_cmd->add_option("--out", predict_out, "Predictions file")->required();

  // gen-negatives
  std::string neg_corpus, neg_graph, neg_out;
  std::optional<std::size_t> neg_count, neg_train_subset;
  auto* neg_cmd = app.add_subcommand("gen-negatives", "Generate plagiarized negatives");
  neg_cmd->add_option("--corpus", neg_corpus, "Split corpus file")->required();
  neg_cmd->add_option("--graph", neg_graph, "Graph file")->required();
  neg_cmd->add_option("--count", neg_count, "Number of negatives");
  neg_cmd->add_option("--train-subset", neg_train_subset, "Negatives used for training");
  neg_cmd->add_option("--out", neg_out, "Negatives file")->required();

  // eval
  std::string eval_pred, eval_corpus, eval_out, eval_costs, eval_method = "graph";
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against the corpus labels");
  eval_cmd->add_option("--pred", eval_pred, "Predictions file")->required();
  eval_cmd->add_option("--corpus", eval_corpus, "Split corpus file")->required();
  eval_cmd->add_option("--out", eval_out, "Report file")->required();
  eval_cmd->add_option("--costs", eval_costs, "JSON map of method to average cost");
  eval_cmd->add_option("--method", eval_method, "Method name for this prediction file");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run every stage from the config file");

  // check-config
  auto* check_cmd = app.add_subcommand("check-config", "Validate a config file and print it");

  // synth
  std::string synth_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic separable corpus");
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->required();
  synth_cmd->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_cmd->parsed() || run_cmd->parsed()) {
      if (g.config_path.empty()) throw Error("--config is required");
      auto result = validate_config_file(g.config_path);
      if (!result.config) {
        print_issues(result.errors);
        return 2;
      }
      RunConfig config = *result.config;
      if (g.seed) config.seed = *g.seed;
      if (const char* key = std::getenv(kApiKeyVariable)) {
        config.llm.api_key = key;
        config.embedding.remote.api_key = key;
      }
      if (check_cmd->parsed()) {
        std::cout << config_to_json(config).dump(2) << '\n';
        return 0;
      }
      const RunManifest manifest = run_pipeline(config, {g.force, g.quiet});
      if (!g.quiet) {
        std::ifstream table(config.work_dir / "report.txt");
        std::cout << table.rdbuf();
      }
      return manifest.succeeded() ? 0 : 1;
    }

    const RunConfig config = load_settings(g);

    if (split_cmd->parsed()) {
      const SplitFractions f = fractions_text.empty() ? config.split : parse_fractions(fractions_text);
      const Corpus corpus = split_corpus(load_corpus(split_in), f, stage_seed(config, "split"));
      save_corpus(corpus, split_out);
      note(g, fmt::format("{} ideas: {} train, {} validation, {} test", corpus.ideas.size(),
                          corpus.in_split(Split::kTrain).size(),
                          corpus.in_split(Split::kValidation).size(),
                          corpus.in_split(Split::kTest).size()));
    } else if (extract_cmd->parsed()) {
      LlmBackendConfig llm = config.llm;
      if (!backend_name.empty()) llm.kind = backend_name == "mock" ? BackendKind::kMock : BackendKind::kRemote;
      llm.mock_seed = stage_seed(config, "extract");
      llm.validate();
      const Corpus corpus = load_corpus(extract_in);
      const auto backend = make_chat_backend(llm);
      std::vector<const Idea*> ideas;
      for (const auto& idea : corpus.ideas) ideas.push_back(&idea);
      const auto extracted = extract_viewpoints_batch(
          ideas, *backend, PromptTemplate::viewpoint_extraction(), llm.max_in_flight);
      std::vector<ViewpointRecord> records;
      std::vector<std::string> texts;
      std::vector<std::vector<std::string>> lists;
      std::vector<std::vector<ViewpointPair>> pairs;
      for (std::size_t i = 0; i < ideas.size(); ++i) {
        ViewpointRecord r{ideas[i]->id, ideas[i]->split, ideas[i]->timestamp,
                          extracted[i].viewpoints, extracted[i].usage, {}};
        if ((with_relations || config.relations) && r.viewpoints.size() >= 2) {
          const auto rel = extract_relations(r.viewpoints, *ideas[i], *backend,
                                             PromptTemplate::relation_extraction());
          r.pairs = rel.pairs;
          r.usage.prompt_tokens += rel.usage.prompt_tokens;
          r.usage.completion_tokens += rel.usage.completion_tokens;
        }
        texts.push_back(ideas[i]->text);
        lists.push_back(r.viewpoints);
        pairs.push_back(r.pairs);
        records.push_back(std::move(r));
      }
      save_viewpoints(extract_out, records);
      const auto summary = summarize_extraction(texts, lists, pairs);
      note(g, fmt::format("{} ideas, {:.2f} viewpoints per idea, {:.2f} words per viewpoint",
                          summary.ideas, summary.avg_viewpoints, summary.avg_viewpoint_words));
    } else if (embed_cmd->parsed()) {
      EmbeddingSettings settings = config.embedding;
      if (!provider_name.empty()) {
        settings.backend = provider_name == "stub" ? EmbeddingBackend::kStub : EmbeddingBackend::kRemote;
      }
      if (embed_dim) settings.remote.dimension = *embed_dim;
      const auto records = load_viewpoints(embed_in);
      std::vector<std::string> texts;
      for (const auto& r : records) texts.insert(texts.end(), r.viewpoints.begin(), r.viewpoints.end());
      save_embeddings(embed_out, viewpoint_row_ids(records),
                      embed(texts, *make_embedding_provider(settings)));
      note(g, fmt::format("{} viewpoints embedded", texts.size()));
    } else if (build_cmd->parsed()) {
      GraphConfig graph_config = config.graph;
      if (build_k) graph_config.intra_degree = *build_k;
      if (build_m) graph_config.inter_degree = *build_m;
      const auto records = load_viewpoints(build_viewpoints);
      const auto file = load_embeddings(build_embeddings);
      if (file.ids != viewpoint_row_ids(records)) {
        throw Error("embedding ids do not match the viewpoints file");
      }
      const ViewpointGraph graph =
          build_graph(to_idea_viewpoints(records), file.matrix, graph_config);
      save_graph(graph, build_out);
      note(g, fmt::format("{} nodes, {} edges", graph.node_count(), graph.edges().size()));
    } else if (lp_cmd->parsed()) {
      LpConfig lp = config.lp;
      if (lp_iterations) lp.max_iterations = *lp_iterations;
      if (lp_early_stop) lp.early_stop = *lp_early_stop;
      const Corpus corpus = load_corpus(lp_corpus);
      const auto predictions = run_label_propagation(load_graph(lp_graph), corpus, lp,
                                                     parse_split_flag(lp_split));
      save_lp_predictions(lp_out, predictions, corpus.labels);
      note(g, fmt::format("{} predictions", predictions.size()));
    } else if (train_cmd->parsed()) {
      GnnConfig gnn = config.gnn;
      gnn.seed = stage_seed(config, "train");
      if (train_epochs) gnn.max_epochs = *train_epochs;
      const Corpus corpus = load_corpus(train_corpus);
      std::vector<NegativeSample> negatives;
      ViewpointGraph graph = load_graph(train_graph);
      if (!train_negatives.empty()) {
        negatives = load_negatives(train_negatives, corpus.labels);
        graph = inject_negatives(graph, negatives, graph.config());
      }
      const TrainResult result = train(gnn, graph, corpus, negatives);
      save_checkpoint(train_out, {result.model, result.best_epoch, result.best_validation_macro_f1});
      if (!train_log.empty()) save_train_log(train_log, result.log);
      note(g, fmt::format("kept epoch {} of {}", result.best_epoch, result.log.size()));
    } else if (predict_cmd->parsed()) {
      const Checkpoint checkpoint = load_checkpoint(predict_model);
      const ViewpointGraph graph =
          graph_with_negatives(predict_graph, predict_negatives, checkpoint.model.labels);
      const auto predictions =
          predict_split(checkpoint.model, graph, parse_split_flag(predict_split_name));
      save_gnn_predictions(predict_out, predictions, checkpoint.model.labels);
      note(g, fmt::format("{} predictions", predictions.size()));
    } else if (neg_cmd->parsed()) {
      NegativeOptions options = config.novelty.options;
      if (neg_count) options.count = *neg_count;
      if (neg_train_subset) options.train_subset = *neg_train_subset;
      options.seed = stage_seed(config, "negatives");
      const Corpus corpus = load_corpus(neg_corpus);
      const auto set = generate_negatives(corpus, load_graph(neg_graph), options);
      save_negatives(neg_out, set.samples, corpus.labels);
      note(g, fmt::format("{} negatives, {} neighbor-swap fallbacks", set.samples.size(),
                          set.warnings));
    } else if (eval_cmd->parsed()) {
      const Corpus corpus = load_corpus(eval_corpus);
      std::map<std::string, double> costs;
      if (!eval_costs.empty()) {
        std::ifstream in(eval_costs);
        if (!in) throw Error("cannot open " + eval_costs);
        costs = nlohmann::json::parse(in).get<std::map<std::string, double>>();
      }
      const EvaluationReport report = evaluate_methods({{eval_method, eval_pred}}, corpus, costs);
      std::ofstream out(eval_out);
      if (!out) throw Error("cannot write " + eval_out);
      out << report.json.dump(2) << '\n';
      if (!g.quiet) std::cout << report.table;
    } else if (synth_cmd->parsed()) {
      SyntheticOptions options;
      options.seed = config.seed;
      const SyntheticCorpus synthetic = make_synthetic(options);
      fs::create_directories(synth_dir);
      save_corpus(synthetic.corpus, fs::path(synth_dir) / "split.jsonl");
      std::vector<ViewpointRecord> records;
      for (const auto& v : synthetic.viewpoints) {
        records.push_back({v.idea, v.split, v.timestamp, v.texts, {}, {}});
      }
      save_viewpoints(fs::path(synth_dir) / "viewpoints.jsonl", records);
      save_embeddings(fs::path(synth_dir) / "embeddings.bin", viewpoint_row_ids(records),
                      synthetic.embeddings);
    }
  } catch (const std::exception& e) {
    std::cerr << "viewgraph: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
