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

#include "viewgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {

using nlohmann::json;

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
    case Split::kUnassigned:
      break;
  }
  return "unassigned";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw Error("unknown split \"" + std::string(name) + "\"");
}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw Error("a label set needs at least 2 labels");
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw Error("label names must be non-empty");
    if (!seen.insert(name).second) {
      throw Error("duplicate label name \"" + name + "\"");
    }
  }
}

std::optional<std::size_t> LabelSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

LabelSet LabelSet::conference_decisions() {
  return LabelSet({"Reject", "Accept (Poster)", "Accept (Oral)",
                   "Accept (Spotlight)"});
}

const Idea* Corpus::find(std::string_view id) const {
  for (const auto& idea : ideas) {
    if (idea.id == id) return &idea;
  }
  return nullptr;
}

std::vector<const Idea*> Corpus::in_split(Split split) const {
  std::vector<const Idea*> out;
  for (const auto& idea : ideas) {
    if (idea.split == split) out.push_back(&idea);
  }
  return out;
}

namespace {

Idea parse_idea(const json& record, const LabelSet& labels, std::size_t line,
                const std::string& raw) {
  auto fail = [&](const std::string& what) -> RecordError {
    return RecordError(line, raw, what);
  };
  if (!record.is_object()) throw fail("record is not a JSON object");

  Idea idea;
  auto required_string = [&](const char* key) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string()) {
      throw fail(std::string("missing or non-string field \"") + key + "\"");
    }
    return it->get<std::string>();
  };
  idea.id = required_string("id");
  if (idea.id.empty()) throw fail("empty id");
  idea.text = required_string("text");
  if (idea.text.empty()) throw fail("empty text for id \"" + idea.id + "\"");
  if (auto it = record.find("title"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw fail("non-string title");
    idea.title = it->get<std::string>();
  }
  if (auto it = record.find("label"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw fail("non-string label");
    const auto name = it->get<std::string>();
    const auto index = labels.index_of(name);
    if (!index) throw fail("unknown label \"" + name + "\"");
    idea.label = *index;
  }
  if (auto it = record.find("timestamp"); it != record.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw fail("timestamp must be an integer");
    idea.timestamp = it->get<std::int64_t>();
    if (idea.timestamp < 0) throw fail("negative timestamp");
  }
  if (auto it = record.find("split"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw fail("non-string split");
    try {
      idea.split = parse_split(it->get<std::string>());
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (idea.split == Split::kTrain && !idea.label) {
    throw fail("train idea \"" + idea.id + "\" has no label");
  }
  return idea;
}

}  // namespace

Corpus read_corpus(std::istream& in, const std::optional<LabelSet>& expected) {
  Corpus corpus;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  std::unordered_set<std::string> ids;

  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;

    json record;
    try {
      record = json::parse(raw);
    } catch (const json::exception& e) {
      throw RecordError(line, raw, std::string("malformed JSON: ") + e.what());
    }

    if (!have_header) {
      auto it = record.find("labels");
      if (!record.is_object() || it == record.end() || !it->is_array()) {
        throw RecordError(line, raw, "first line must be {\"labels\": [...]}");
      }
      try {
        corpus.labels = LabelSet(it->get<std::vector<std::string>>());
      } catch (const std::exception& e) {
        throw RecordError(line, raw, e.what());
      }
      if (expected && !(*expected == corpus.labels)) {
        throw RecordError(line, raw, "label set differs from the expected one");
      }
      have_header = true;
      continue;
    }

    Idea idea = parse_idea(record, corpus.labels, line, raw);
    if (!ids.insert(idea.id).second) {
      throw RecordError(line, raw, "duplicate id \"" + idea.id + "\"");
    }
    corpus.ideas.push_back(std::move(idea));
  }
  if (!have_header) throw Error("corpus has no header line");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path,
                   const std::optional<LabelSet>& expected) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  return read_corpus(in, expected);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  out << json{{"labels", corpus.labels.names()}}.dump() << '\n';
  for (const auto& idea : corpus.ideas) {
    json record;
    record["id"] = idea.id;
    record["title"] = idea.title;
    record["text"] = idea.text;
    record["label"] = idea.label ? json(corpus.labels.name(*idea.label))
                                 : json(nullptr);
    record["timestamp"] = idea.timestamp;
    record["split"] = idea.split == Split::kUnassigned
                          ? json(nullptr)
                          : json(std::string(split_name(idea.split)));
    out << record.dump() << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus " + path.string());
  write_corpus(out, corpus);
}

void validate_fractions(const SplitFractions& f) {
  for (double value : {f.train, f.validation, f.test}) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error("split fractions must lie in [0, 1]");
    }
  }
  if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
    throw Error("split fractions must sum to 1");
  }
}

Corpus split_corpus(const Corpus& corpus, const SplitFractions& fractions,
                    std::uint64_t seed) {
  validate_fractions(fractions);
  const std::size_t n = corpus.ideas.size();
  const auto rounded = [n](double fraction) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  };
  const std::size_t n_train = std::min(rounded(fractions.train), n);
  const std::size_t n_validation =
      std::min(rounded(fractions.validation), n - n_train);

  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < n; ++i) {
    if (corpus.ideas[i].label) labeled.push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(labeled);

  Corpus out = corpus;
  for (auto& idea : out.ideas) idea.split = Split::kTest;
  for (std::size_t r = 0; r < labeled.size(); ++r) {
    Split split = Split::kTest;
    if (r < n_train) {
      split = Split::kTrain;
    } else if (r < n_train + n_validation) {
      split = Split::kValidation;
    }
    out.ideas[labeled[r]].split = split;
  }
  return out;
}

std::vector<double> label_distribution(const Corpus& corpus, Split split) {
  std::vector<double> counts(corpus.labels.size(), 0.0);
  std::size_t total = 0;
  for (const auto& idea : corpus.ideas) {
    if (idea.split != split) continue;
    if (!idea.label) throw Error("idea \"" + idea.id + "\" has no label");
    counts[*idea.label] += 1.0;
    ++total;
  }
  if (total == 0) {
    throw Error("split " + std::string(split_name(split)) + " is empty");
  }
  for (auto& c : counts) c /= static_cast<double>(total);
  return counts;
}

}  // namespace viewgraph
