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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "viewgraph/http.hpp"

namespace viewgraph {

// Row-major matrix of embedding vectors with cached Euclidean norms.
// All-zero rows are rejected.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dimension) : dimension_(dimension) {}
  explicit EmbeddingMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return norms_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::span<const double> row(std::size_t index) const {
    return {values_.data() + index * dimension_, dimension_};
  }
  double norm(std::size_t index) const { return norms_[index]; }

  // Cosine similarity of two rows, clamped into [-1, 1].
  double similarity(std::size_t a, std::size_t b) const;

  void append(std::span<const double> values);

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> values_;
  std::vector<double> norms_;
};

// Throws on zero vectors or unequal dimensions.
double cosine(std::span<const double> a, std::span<const double> b);

struct ScoredNeighbor {
  std::size_t index;
  double similarity;

  bool operator==(const ScoredNeighbor&) const = default;
};

// The min(k, |candidates|) candidates most similar to `query`, by descending
// similarity and then ascending row index. `query` itself is never returned.
std::vector<ScoredNeighbor> top_k_neighbors(
    const EmbeddingMatrix& matrix, std::size_t query, std::size_t k,
    const std::function<bool(std::size_t)>& is_candidate);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<std::vector<double>> encode(
      const std::vector<std::string>& texts) const = 0;
};

// Seeds a generator with a hash of the text, draws `dimension` uniform values
// in [-1, 1) and normalizes to unit length.
class StubEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::size_t dimension = 32);

  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> encode(
      const std::vector<std::string>& texts) const override;

 private:
  std::size_t dimension_;
};

struct RemoteEmbeddingConfig {
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::size_t dimension = 32;
  std::size_t batch_size = 64;
  RetryPolicy retry;
};

// POST {model, input: [texts]} -> {data: [{embedding: [...]}, ...]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);

  std::size_t dimension() const override { return config_.dimension; }
  std::vector<std::vector<double>> encode(
      const std::vector<std::string>& texts) const override;

 private:
  RemoteEmbeddingConfig config_;
};

// One row per text, validated against the provider's dimension.
EmbeddingMatrix embed(const std::vector<std::string>& texts,
                      const EmbeddingProvider& provider);

// Embedding file: one JSON header line {count, dimension, ids} followed by
// count * dimension little-endian float32 values, row-major.
struct EmbeddingFile {
  std::vector<std::string> ids;
  EmbeddingMatrix matrix;
};

void save_embeddings(const std::filesystem::path& path,
                     const std::vector<std::string>& ids,
                     const EmbeddingMatrix& matrix);
EmbeddingFile load_embeddings(const std::filesystem::path& path);

}  // namespace viewgraph
