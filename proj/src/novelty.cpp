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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {

using nlohmann::json;

double TemporalEncoding::feature(std::int64_t timestamp) const {
  if (max_timestamp <= min_timestamp) return 0.0;
  const double t = static_cast<double>(timestamp - min_timestamp) /
                   static_cast<double>(max_timestamp - min_timestamp);
  return std::clamp(t, 0.0, 1.0);
}

TemporalEncoding encode_time(std::span<const std::int64_t> timestamps) {
  if (timestamps.empty()) throw Error("encode_time: no timestamps");
  const auto [lo, hi] = std::minmax_element(timestamps.begin(), timestamps.end());
  return {*lo, *hi};
}

TemporalEncoding encode_time(const Corpus& corpus) {
  std::vector<std::int64_t> stamps;
  stamps.reserve(corpus.ideas.size());
  for (const auto& idea : corpus.ideas) stamps.push_back(idea.timestamp);
  return encode_time(stamps);
}

std::string_view plagiarism_name(PlagiarismKind kind) {
  switch (kind) {
    case PlagiarismKind::kCopy:
      return "copy";
    case PlagiarismKind::kRandomSwap:
      return "random-swap";
    case PlagiarismKind::kNeighborSwap:
      return "neighbor-swap";
  }
  return "copy";
}

PlagiarismKind parse_plagiarism(std::string_view name) {
  if (name == "copy") return PlagiarismKind::kCopy;
  if (name == "random-swap") return PlagiarismKind::kRandomSwap;
  if (name == "neighbor-swap") return PlagiarismKind::kNeighborSwap;
  throw Error("unknown plagiarism strategy \"" + std::string(name) + "\"");
}

void NegativeOptions::validate() const {
  if (strategies.empty()) throw Error("novelty.strategies must not be empty");
  if (!(swap_fraction > 0.0 && swap_fraction <= 1.0)) {
    throw Error("novelty.swap_fraction must lie in (0, 1]");
  }
  if (train_subset > count) {
    throw Error("novelty.train_subset exceeds novelty.count");
  }
}

namespace {

// Random replacement for `position` drawn from other ideas' viewpoints. Draws
// that happen to repeat the original text are retried a bounded number of times.
std::optional<std::string> random_replacement(const ViewpointGraph& graph,
                                              const std::vector<std::size_t>& foreign,
                                              const std::string& original, Rng& rng) {
  if (foreign.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const auto& text = graph.nodes()[foreign[rng.index(foreign.size())]].text;
    if (text != original) return text;
  }
  for (std::size_t node : foreign) {
    if (graph.nodes()[node].text != original) return graph.nodes()[node].text;
  }
  return std::nullopt;
}

std::optional<std::string> neighbor_replacement(const ViewpointGraph& graph,
                                                std::size_t node) {
  const Adjacent* best = nullptr;
  for (const auto& adj : graph.neighbors(node)) {
    if (adj.kind != EdgeKind::kInter) continue;
    if (graph.nodes()[adj.node].text == graph.nodes()[node].text) continue;
    if (best == nullptr || adj.weight > best->weight) best = &adj;
  }
  if (best == nullptr) return std::nullopt;
  return graph.nodes()[best->node].text;
}

}  // namespace

NegativeSet generate_negatives(const Corpus& corpus, const ViewpointGraph& graph,
                               const NegativeOptions& options) {
  options.validate();
  if (options.negative_label >= corpus.labels.size()) {
    throw Error("novelty.negative_label is not a label of the corpus");
  }
  std::vector<const Subgraph*> sources;
  for (const auto& subgraph : graph.subgraphs()) {
    const Idea* idea = corpus.find(subgraph.idea);
    if (idea == nullptr || idea->split != Split::kTrain || !idea->label) continue;
    if (*idea->label >= options.min_source_label && !subgraph.nodes.empty()) {
      sources.push_back(&subgraph);
    }
  }
  if (sources.empty()) {
    throw Error("generate_negatives: no train idea has a label of at least \"" +
                (options.min_source_label < corpus.labels.size()
                     ? corpus.labels.name(options.min_source_label)
                     : std::to_string(options.min_source_label)) +
                "\"");
  }

  std::int64_t latest = 0;
  bool any = false;
  for (const auto& idea : corpus.ideas) {
    latest = any ? std::max(latest, idea.timestamp) : idea.timestamp;
    any = true;
  }
  for (const auto& s : graph.subgraphs()) {
    latest = any ? std::max(latest, s.timestamp) : s.timestamp;
    any = true;
  }
  const std::int64_t stamp = latest + kSecondsPerDay;

  std::set<std::string> taken;
  for (const auto& idea : corpus.ideas) taken.insert(idea.id);
  for (const auto& s : graph.subgraphs()) taken.insert(s.idea);

  Rng rng(options.seed);
  NegativeSet out;
  const std::size_t kinds = options.strategies.size();
  std::size_t serial = 0;
  for (std::size_t k = 0; k < kinds; ++k) {
    const PlagiarismKind kind = options.strategies[k];
    const std::size_t quota = options.count / kinds + (k < options.count % kinds ? 1 : 0);
    for (std::size_t q = 0; q < quota; ++q, ++serial) {
      const Subgraph& source = *sources[rng.index(sources.size())];
      NegativeSample sample;
      sample.id = "neg-" + std::to_string(serial);
      while (taken.count(sample.id) != 0) sample.id += "x";
      taken.insert(sample.id);
      sample.source_id = source.idea;
      sample.strategy = kind;
      sample.timestamp = stamp;
      sample.label = options.negative_label;
      for (std::size_t node : source.nodes) sample.viewpoints.push_back(graph.nodes()[node].text);

      if (kind != PlagiarismKind::kCopy) {
        const std::size_t n = source.nodes.size();
        const auto swaps = static_cast<std::size_t>(
            std::ceil(options.swap_fraction * static_cast<double>(n) - 1e-12));
        std::vector<std::size_t> positions(n);
        for (std::size_t i = 0; i < n; ++i) positions[i] = i;
        rng.shuffle(positions);
        positions.resize(std::min(swaps, n));
        std::sort(positions.begin(), positions.end());

        std::vector<std::size_t> foreign;
        for (std::size_t i = 0; i < graph.node_count(); ++i) {
          if (graph.nodes()[i].idea != source.idea) foreign.push_back(i);
        }
        for (std::size_t pos : positions) {
          std::optional<std::string> replacement;
          if (kind == PlagiarismKind::kNeighborSwap) {
            replacement = neighbor_replacement(graph, source.nodes[pos]);
            if (!replacement) ++out.warnings;
          }
          if (!replacement) {
            replacement = random_replacement(graph, foreign, sample.viewpoints[pos], rng);
          }
          if (!replacement) {
            throw Error("generate_negatives: no viewpoint outside \"" + source.idea +
                        "\" to swap in");
          }
          sample.viewpoints[pos] = *replacement;
        }
      }
      out.samples.push_back(std::move(sample));
    }
  }

  std::vector<std::size_t> order(out.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.samples[order[i]].split = i < options.train_subset ? Split::kTrain : Split::kTest;
  }
  return out;
}

ViewpointGraph inject_negatives(const ViewpointGraph& graph,
                                std::span<const NegativeSample> negatives,
                                const GraphConfig& config) {
  std::map<std::string, std::size_t> row_of_text;
  for (const auto& node : graph.nodes()) row_of_text.try_emplace(node.text, node.row);

  ViewpointGraph current = graph;
  for (const auto& negative : negatives) {
    if (current.find_subgraph(negative.id) != nullptr) {
      throw Error("negative id \"" + negative.id + "\" collides with an existing idea");
    }
    EmbeddingMatrix rows(graph.features().dimension());
    for (const auto& text : negative.viewpoints) {
      const auto it = row_of_text.find(text);
      if (it == row_of_text.end()) {
        throw Error("negative \"" + negative.id + "\" has a viewpoint not in the graph: " + text);
      }
      rows.append(graph.features().row(it->second));
    }
    current = integrate_subgraph(
        current, {negative.id, Split::kUnassigned, negative.timestamp, negative.viewpoints},
        rows, config);
  }
  return current;
}

void save_negatives(const std::filesystem::path& path,
                    const std::vector<NegativeSample>& negatives,
                    const LabelSet& labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& n : negatives) {
    json record = {{"id", n.id},
                   {"source_id", n.source_id},
                   {"strategy", plagiarism_name(n.strategy)},
                   {"viewpoints", n.viewpoints},
                   {"timestamp", n.timestamp},
                   {"label", labels.name(n.label)},
                   {"split", split_name(n.split)}};
    out << record.dump() << '\n';
  }
}

std::vector<NegativeSample> load_negatives(const std::filesystem::path& path,
                                           const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<NegativeSample> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      NegativeSample n;
      n.id = j.at("id").get<std::string>();
      n.source_id = j.at("source_id").get<std::string>();
      n.strategy = parse_plagiarism(j.at("strategy").get<std::string>());
      n.viewpoints = j.at("viewpoints").get<std::vector<std::string>>();
      n.timestamp = j.at("timestamp").get<std::int64_t>();
      const auto label = labels.index_of(j.at("label").get<std::string>());
      if (!label) throw Error("unknown label");
      n.label = *label;
      n.split = j.contains("split") ? parse_split(j.at("split").get<std::string>())
                                    : Split::kTest;
      if (n.viewpoints.empty()) throw Error("negative has no viewpoints");
      if (!ids.insert(n.id).second) throw Error("duplicate id \"" + n.id + "\"");
      out.push_back(std::move(n));
    } catch (const RecordError&) {
      throw;
    } catch (const std::exception& e) {
      throw RecordError(line_number, line, e.what());
    }
  }
  return out;
}

}  // namespace viewgraph
