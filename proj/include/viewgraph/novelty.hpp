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

// Plagiarized-idea negatives for novelty-aware training. A negative is built
// from a highly-rated idea's viewpoints, stamped one day after the newest
// idea in the corpus and labeled with the worst label.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/graph.hpp"
#include "viewgraph/temporal.hpp"

namespace viewgraph {

enum class PlagiarismKind { kCopy, kRandomSwap, kNeighborSwap };

std::string_view plagiarism_name(PlagiarismKind kind);
PlagiarismKind parse_plagiarism(std::string_view name);

struct NegativeSample {
  std::string id;
  std::string source_id;
  PlagiarismKind strategy = PlagiarismKind::kCopy;
  std::vector<std::string> viewpoints;
  std::int64_t timestamp = 0;
  std::size_t label = 0;
  // kTrain for the subset that carries its label into training; kTest for
  // held-out negatives.
  Split split = Split::kTest;

  bool operator==(const NegativeSample&) const = default;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct NegativeOptions {
  std::size_t count = 80;
  std::vector<PlagiarismKind> strategies = {PlagiarismKind::kCopy,
                                            PlagiarismKind::kRandomSwap,
                                            PlagiarismKind::kNeighborSwap};
  // Fraction of viewpoints replaced by the swap strategies, in (0, 1].
  double swap_fraction = 0.5;
  // Ideas whose label index is at least this value are sources.
  std::size_t min_source_label = 1;
  std::size_t negative_label = 0;
  // How many negatives are marked for training; the rest are held out.
  std::size_t train_subset = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NegativeSet {
  std::vector<NegativeSample> samples;
  // Neighbor-swap slots that fell back to a random swap.
  std::size_t warnings = 0;
};

// Sources are labeled train ideas with label >= min_source_label. Counts are
// split as evenly as possible over the strategies, in the order given.
NegativeSet generate_negatives(const Corpus& corpus, const ViewpointGraph& graph,
                               const NegativeOptions& options);

// Integrates every negative as a new subgraph. Viewpoint vectors are looked up
// by text among the graph's existing nodes (every negative viewpoint is a copy
// of one), so copies reuse their source's embeddings exactly.
ViewpointGraph inject_negatives(const ViewpointGraph& graph,
                                std::span<const NegativeSample> negatives,
                                const GraphConfig& config);

void save_negatives(const std::filesystem::path& path,
                    const std::vector<NegativeSample>& negatives,
                    const LabelSet& labels);
std::vector<NegativeSample> load_negatives(const std::filesystem::path& path,
                                           const LabelSet& labels);

}  // namespace viewgraph
