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

// Idea corpora: the ordered label set, JSON-lines ingestion and
// deterministic train/validation/test splitting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace viewgraph {

enum class Split { kUnassigned, kTrain, kValidation, kTest };

std::string_view split_name(Split split);
// Accepts "train", "validation", "test"; throws on anything else.
Split parse_split(std::string_view name);

// Ordered quality labels. Index 0 is the worst label.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const LabelSet&) const = default;

  // Reject, Accept (Poster), Accept (Oral), Accept (Spotlight).
  static LabelSet conference_decisions();

 private:
  std::vector<std::string> names_;
};

struct Idea {
  std::string id;
  std::string title;
  std::string text;
  std::optional<std::size_t> label;
  std::int64_t timestamp = 0;
  Split split = Split::kUnassigned;

  bool operator==(const Idea&) const = default;
};

struct Corpus {
  LabelSet labels;
  std::vector<Idea> ideas;

  const Idea* find(std::string_view id) const;
  std::vector<const Idea*> in_split(Split split) const;

  bool operator==(const Corpus&) const = default;
};

// Reads the header line {"labels": [...]} followed by one idea per line.
// When `expected` is given the header must declare exactly that label set.
Corpus read_corpus(std::istream& in,
                   const std::optional<LabelSet>& expected = std::nullopt);
Corpus load_corpus(const std::filesystem::path& path,
                   const std::optional<LabelSet>& expected = std::nullopt);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct SplitFractions {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

// Throws when any fraction lies outside [0, 1] or the sum differs from 1 by
// more than 1e-9.
void validate_fractions(const SplitFractions& fractions);

// Assigns every idea a split. Sizes are the rounded fractions of the corpus
// size; unlabeled ideas always land in test.
Corpus split_corpus(const Corpus& corpus, const SplitFractions& fractions,
                    std::uint64_t seed);

// Fraction of ideas per label within one split.
std::vector<double> label_distribution(const Corpus& corpus, Split split);

}  // namespace viewgraph
