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

#include "viewgraph/synthetic.hpp"

#include <cmath>

#include "viewgraph/error.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {
namespace {

std::vector<double> unit_gaussian(std::size_t dimension, Rng& rng) {
  std::vector<double> v(dimension);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace

SyntheticCorpus make_synthetic(const SyntheticOptions& options) {
  if (options.labels < 2) throw Error("synthetic corpus needs at least 2 labels");
  if (options.ideas < options.labels) throw Error("synthetic corpus needs an idea per label");
  if (options.viewpoints_per_idea < 1 || options.dimension < 1) {
    throw Error("synthetic corpus needs viewpoints and a positive dimension");
  }
  Rng rng(derive_seed(options.seed, "synthetic.embeddings"));
  std::vector<std::vector<double>> centroids;
  for (std::size_t c = 0; c < options.labels; ++c) {
    centroids.push_back(unit_gaussian(options.dimension, rng));
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < options.labels; ++c) names.push_back("class-" + std::to_string(c));

  SyntheticCorpus out;
  Corpus raw;
  raw.labels = LabelSet(names);
  out.embeddings = EmbeddingMatrix(options.dimension);
  const double scale = options.noise / std::sqrt(static_cast<double>(options.dimension));
  for (std::size_t i = 0; i < options.ideas; ++i) {
    const std::size_t label = i % options.labels;
    Idea idea;
    idea.id = "syn-" + std::to_string(i);
    idea.title = "Synthetic idea " + std::to_string(i);
    idea.label = label;
    idea.timestamp = options.first_timestamp + static_cast<std::int64_t>(i) * options.timestamp_step;
    IdeaViewpoints vp{idea.id, Split::kUnassigned, idea.timestamp, {}};
    for (std::size_t j = 0; j < options.viewpoints_per_idea; ++j) {
      const std::string text = "Idea " + std::to_string(i) + " claims point " +
                               std::to_string(j) + " about topic " + names[label] + ".";
      idea.text += (j ? " " : "") + text;
      vp.texts.push_back(text);
      std::vector<double> row = centroids[label];
      for (auto& x : row) x += scale * rng.normal();
      out.embeddings.append(row);
    }
    raw.ideas.push_back(std::move(idea));
    out.viewpoints.push_back(std::move(vp));
  }
  out.corpus = split_corpus(raw, options.fractions, derive_seed(options.seed, "synthetic.split"));
  for (std::size_t i = 0; i < out.viewpoints.size(); ++i) {
    out.viewpoints[i].split = out.corpus.ideas[i].split;
  }
  return out;
}

}  // namespace viewgraph
