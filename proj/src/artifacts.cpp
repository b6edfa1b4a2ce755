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

#include <fstream>
#include <set>

#include "json.hpp"
#include "viewgraph/error.hpp"

namespace viewgraph {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const std::exception& e) {
      throw RecordError(number, line, path.string() + ": " + e.what());
    }
  }
}

std::string polarity_text(Polarity p) {
  return p == Polarity::kSupporting ? "supporting" : "opposing";
}

}  // namespace

void save_viewpoints(const std::filesystem::path& path,
                     const std::vector<ViewpointRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) {
    json pairs = json::array();
    for (const auto& p : r.pairs) {
      pairs.push_back({{"left", p.left_index},
                       {"right", p.right_index},
                       {"connector", p.connector},
                       {"polarity", polarity_text(p.polarity)}});
    }
    json record = {{"id", r.id},
                   {"split", r.split == Split::kUnassigned ? json(nullptr)
                                                           : json(split_name(r.split))},
                   {"timestamp", r.timestamp},
                   {"viewpoints", r.viewpoints},
                   {"usage",
                    {{"prompt_tokens", r.usage.prompt_tokens},
                     {"completion_tokens", r.usage.completion_tokens},
                     {"price_per_million", r.usage.price_per_million}}},
                   {"pairs", std::move(pairs)}};
    out << record.dump() << '\n';
  }
}

std::vector<ViewpointRecord> load_viewpoints(const std::filesystem::path& path) {
  std::vector<ViewpointRecord> out;
  std::set<std::string> ids;
  for_each_record(path, [&](const json& j) {
    ViewpointRecord r;
    r.id = j.at("id").get<std::string>();
    if (!ids.insert(r.id).second) throw Error("duplicate id \"" + r.id + "\"");
    if (!j.at("split").is_null()) r.split = parse_split(j.at("split").get<std::string>());
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    r.viewpoints = j.at("viewpoints").get<std::vector<std::string>>();
    if (r.viewpoints.empty()) throw Error("idea \"" + r.id + "\" has no viewpoints");
    const auto& usage = j.at("usage");
    r.usage.prompt_tokens = usage.at("prompt_tokens").get<std::int64_t>();
    r.usage.completion_tokens = usage.at("completion_tokens").get<std::int64_t>();
    r.usage.price_per_million = usage.at("price_per_million").get<double>();
    for (const auto& p : j.value("pairs", json::array())) {
      ViewpointPair pair;
      pair.left_index = p.at("left").get<std::size_t>();
      pair.right_index = p.at("right").get<std::size_t>();
      if (pair.left_index >= r.viewpoints.size() || pair.right_index >= r.viewpoints.size()) {
        throw Error("pair index out of range");
      }
      pair.left = r.viewpoints[pair.left_index];
      pair.right = r.viewpoints[pair.right_index];
      pair.connector = p.at("connector").get<std::string>();
      const auto polarity = p.at("polarity").get<std::string>();
      if (polarity != "supporting" && polarity != "opposing") {
        throw Error("unknown polarity \"" + polarity + "\"");
      }
      pair.polarity = polarity == "supporting" ? Polarity::kSupporting : Polarity::kOpposing;
      r.pairs.push_back(std::move(pair));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<IdeaViewpoints> to_idea_viewpoints(const std::vector<ViewpointRecord>& records) {
  std::vector<IdeaViewpoints> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.id, r.split, r.timestamp, r.viewpoints});
  return out;
}

std::vector<std::string> viewpoint_row_ids(const std::vector<ViewpointRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& r : records) {
    for (std::size_t j = 0; j < r.viewpoints.size(); ++j) {
      ids.push_back(r.id + "#" + std::to_string(j));
    }
  }
  return ids;
}

void save_lp_predictions(const std::filesystem::path& path,
                         const std::vector<LpPrediction>& predictions,
                         const LabelSet& labels) {
  auto out = open_out(path);
  for (const auto& p : predictions) {
    out << json{{"id", p.idea},
                {"label", labels.name(p.prediction.label)},
                {"vector", p.prediction.summed},
                {"unreached", p.prediction.unreached}}
               .dump()
        << '\n';
  }
}

void save_gnn_predictions(const std::filesystem::path& path,
                          const std::vector<SubgraphPrediction>& predictions,
                          const LabelSet& labels) {
  auto out = open_out(path);
  for (const auto& p : predictions) {
    out << json{{"id", p.idea},
                {"label", labels.name(p.label)},
                {"probabilities", p.probabilities}}
               .dump()
        << '\n';
  }
}

std::vector<PredictedLabel> load_predicted_labels(const std::filesystem::path& path,
                                                  const LabelSet& labels) {
  std::vector<PredictedLabel> out;
  for_each_record(path, [&](const json& j) {
    const auto name = j.at("label").get<std::string>();
    const auto label = labels.index_of(name);
    if (!label) throw Error("unknown label \"" + name + "\"");
    out.push_back({j.at("id").get<std::string>(), *label});
  });
  return out;
}

void save_train_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  auto out = open_out(path);
  for (const auto& e : log) {
    out << json{{"epoch", e.epoch},
                {"learning_rate", e.learning_rate},
                {"loss", e.loss},
                {"train_accuracy", e.train_accuracy},
                {"validation_macro_f1", e.validation_macro_f1 ? json(*e.validation_macro_f1)
                                                              : json(nullptr)}}
               .dump()
        << '\n';
  }
}

EvaluationInput join_with_truths(const std::vector<PredictedLabel>& predictions,
                                 const Corpus& corpus) {
  EvaluationInput out;
  for (const auto& p : predictions) {
    const Idea* idea = corpus.find(p.id);
    if (idea == nullptr || !idea->label) {
      ++out.skipped;
      continue;
    }
    out.predicted.push_back(p.label);
    out.truths.push_back(*idea->label);
  }
  return out;
}

}  // namespace viewgraph
