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

#include "viewgraph/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double clamp_unit(double value) { return std::clamp(value, -1.0, 1.0); }

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return;
  dimension_ = rows.front().size();
  for (const auto& row : rows) append(row);
}

void EmbeddingMatrix::append(std::span<const double> values) {
  if (dimension_ == 0 && rows() == 0) dimension_ = values.size();
  if (values.size() != dimension_) {
    throw Error("embedding dimension mismatch: expected " +
                std::to_string(dimension_) + ", got " +
                std::to_string(values.size()));
  }
  const double norm = std::sqrt(dot(values, values));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error("embedding row " + std::to_string(rows()) +
                " is zero or non-finite");
  }
  values_.insert(values_.end(), values.begin(), values.end());
  norms_.push_back(norm);
}

double EmbeddingMatrix::similarity(std::size_t a, std::size_t b) const {
  return clamp_unit(dot(row(a), row(b)) / (norms_[a] * norms_[b]));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("cosine: dimension mismatch (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  }
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (!(na > 0.0) || !(nb > 0.0)) throw Error("cosine: zero vector");
  return clamp_unit(dot(a, b) / (na * nb));
}

std::vector<ScoredNeighbor> top_k_neighbors(
    const EmbeddingMatrix& matrix, std::size_t query, std::size_t k,
    const std::function<bool(std::size_t)>& is_candidate) {
  std::vector<ScoredNeighbor> scored;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    if (i == query || !is_candidate(i)) continue;
    scored.push_back({i, matrix.similarity(query, i)});
  }
  const auto better = [](const ScoredNeighbor& a, const ScoredNeighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.index < b.index;
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);
  return scored;
}

StubEmbeddingProvider::StubEmbeddingProvider(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ < 2) throw Error("stub embedding dimension must be at least 2");
}

std::vector<std::vector<double>> StubEmbeddingProvider::encode(
    const std::vector<std::string>& texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    Rng rng(fnv1a64(text));
    std::vector<double> row(dimension_);
    double norm = 0.0;
    while (!(norm > 0.0)) {
      for (auto& v : row) v = rng.uniform(-1.0, 1.0);
      norm = std::sqrt(dot(row, row));
    }
    for (auto& v : row) v /= norm;
    out.push_back(std::move(row));
  }
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw Error("remote embedding needs an endpoint");
  if (config_.dimension < 2) throw Error("embedding dimension must be at least 2");
  config_.batch_size = std::max<std::size_t>(config_.batch_size, 1);
}

std::vector<std::vector<double>> RemoteEmbeddingProvider::encode(
    const std::vector<std::string>& texts) const {
  HttpHeaders headers;
  if (!config_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const std::size_t stop = std::min(texts.size(), start + config_.batch_size);
    const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                         texts.begin() + static_cast<std::ptrdiff_t>(stop));
    const nlohmann::json reply = post_json(
        config_.endpoint, {{"model", config_.model}, {"input", batch}}, headers,
        config_.retry);
    try {
      const auto& data = reply.at("data");
      if (data.size() != batch.size()) {
        throw Error("embedding reply has " + std::to_string(data.size()) +
                    " rows for " + std::to_string(batch.size()) + " inputs");
      }
      for (const auto& item : data) {
        out.push_back(item.at("embedding").get<std::vector<double>>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed embedding reply: ") + e.what());
    }
  }
  return out;
}

EmbeddingMatrix embed(const std::vector<std::string>& texts,
                      const EmbeddingProvider& provider) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw Error("text " + std::to_string(i) + " is empty");
  }
  const auto rows = provider.encode(texts);
  if (rows.size() != texts.size()) {
    throw Error("provider returned " + std::to_string(rows.size()) +
                " vectors for " + std::to_string(texts.size()) + " texts");
  }
  EmbeddingMatrix matrix(provider.dimension());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != provider.dimension()) {
      throw Error("embedding dimension mismatch for text " + std::to_string(i) +
                  ": expected " + std::to_string(provider.dimension()) +
                  ", got " + std::to_string(rows[i].size()));
    }
    const bool zero =
        std::all_of(rows[i].begin(), rows[i].end(), [](double v) { return v == 0.0; });
    if (zero) throw Error("provider returned a zero vector for text " + std::to_string(i));
    matrix.append(rows[i]);
  }
  return matrix;
}

namespace {

static_assert(sizeof(float) == 4);

void write_le_float(std::ostream& out, float value) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

float read_le_float(const unsigned char* bytes) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

void save_embeddings(const std::filesystem::path& path,
                     const std::vector<std::string>& ids,
                     const EmbeddingMatrix& matrix) {
  if (ids.size() != matrix.rows()) {
    throw Error("embedding ids and rows differ in count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const nlohmann::json header = {
      {"count", matrix.rows()}, {"dimension", matrix.dimension()}, {"ids", ids}};
  out << header.dump() << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (double v : matrix.row(r)) write_le_float(out, static_cast<float>(v));
  }
}

EmbeddingFile load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string header_line;
  std::getline(in, header_line);
  nlohmann::json header;
  std::size_t count = 0;
  std::size_t dimension = 0;
  EmbeddingFile file;
  try {
    header = nlohmann::json::parse(header_line);
    count = header.at("count").get<std::size_t>();
    dimension = header.at("dimension").get<std::size_t>();
    file.ids = header.at("ids").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": bad embedding header: " + e.what());
  }
  if (file.ids.size() != count) {
    throw Error(path.string() + ": header count disagrees with ids");
  }
  std::vector<unsigned char> blob(count * dimension * 4);
  in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  if (static_cast<std::size_t>(in.gcount()) != blob.size()) {
    throw Error(path.string() + ": truncated embedding payload");
  }
  file.matrix = EmbeddingMatrix(dimension);
  std::vector<double> row(dimension);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < dimension; ++c) {
      row[c] = read_le_float(blob.data() + 4 * (r * dimension + c));
    }
    file.matrix.append(row);
  }
  return file;
}

}  // namespace viewgraph
