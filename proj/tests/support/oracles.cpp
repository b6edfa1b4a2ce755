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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

Dense propagate_dense(const Dense& weights, Dense vectors, std::size_t iterations) {
  const std::size_t n = weights.size();
  Dense p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::accumulate(weights[i].begin(), weights[i].end(), 0.0);
    if (s > 0)
      for (std::size_t j = 0; j < n; ++j) p[i][j] = weights[i][j] / s;
  }
  const std::size_t c = n ? vectors[0].size() : 0;
  for (std::size_t t = 0; t < iterations; ++t) {
    Dense next(n, std::vector<double>(c, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < c; ++l) {
        double acc = vectors[i][l];
        for (std::size_t j = 0; j < n; ++j) acc += p[i][j] * vectors[j][l];
        next[i][l] = acc;
      }
      double z = 0;
      for (double x : next[i]) z += std::abs(x);
      if (z == 0) z = 1;
      for (double& x : next[i]) x /= z;
    }
    vectors = std::move(next);
  }
  return vectors;
}

Dense dense_adjacency(const viewgraph::ViewpointGraph& graph) {
  const std::size_t n = graph.node_count();
  Dense w(n, std::vector<double>(n, 0.0));
  for (const auto& e : graph.edges()) {
    w[e.u][e.v] = e.weight;
    w[e.v][e.u] = e.weight;
  }
  return w;
}

namespace {
double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}
}  // namespace

std::set<Edge> brute_force_edges(const std::vector<std::vector<double>>& rows,
                                 const std::vector<std::size_t>& idea_of,
                                 std::size_t k, std::size_t m, double floor) {
  const std::size_t n = rows.size();
  Dense sim(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sim[i][j] = cos_sim(rows[i], rows[j]);

  std::set<Edge> out;
  auto propose = [&](std::size_t i, bool intra, std::size_t limit) {
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && (idea_of[j] == idea_of[i]) == intra) cand.push_back(j);
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t a, std::size_t b) { return sim[i][a] > sim[i][b]; });
    for (std::size_t r = 0; r < std::min(limit, cand.size()); ++r) {
      const std::size_t j = cand[r];
      Edge e{std::min(i, j), std::max(i, j), std::clamp(sim[i][j], floor, 1.0), intra};
      out.insert(e);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    propose(i, true, k);
    propose(i, false, m);
  }
  return out;
}

ClassScores brute_force_metrics(const std::vector<std::size_t>& truth,
                                const std::vector<std::size_t>& predicted,
                                std::size_t labels) {
  ClassScores s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  s.accuracy = double(correct) / double(truth.size());
  for (std::size_t c = 0; c < labels; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c && truth[i] == c) tp++;
      if (predicted[i] == c && truth[i] != c) fp++;
      if (predicted[i] != c && truth[i] == c) fn++;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
    s.precision.push_back(p);
    s.recall.push_back(r);
    s.f1.push_back(f);
    s.macro_p += p / double(labels);
    s.macro_r += r / double(labels);
    s.macro_f1 += f / double(labels);
  }
  return s;
}

RandomInstance random_instance(std::mt19937_64& gen, std::size_t max_nodes,
                               std::size_t dimension) {
  RandomInstance inst;
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> total_dist(2, max_nodes);
  const std::size_t total = total_dist(gen);
  std::size_t made = 0;
  while (made < total) {
    std::uniform_int_distribution<std::size_t> size_dist(1, std::min<std::size_t>(6, total - made));
    const std::size_t size = size_dist(gen);
    viewgraph::IdeaViewpoints idea;
    idea.idea = "i" + std::to_string(inst.ideas.size());
    idea.timestamp = static_cast<std::int64_t>(inst.ideas.size()) * 100;
    for (std::size_t j = 0; j < size; ++j) {
      std::vector<double> row(dimension);
      for (auto& x : row) x = normal(gen);
      inst.rows.push_back(row);
      inst.idea_of.push_back(inst.ideas.size());
      idea.texts.push_back(idea.idea + "v" + std::to_string(j));
    }
    made += size;
    inst.ideas.push_back(std::move(idea));
  }
  return inst;
}

}  // namespace oracle
