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

#include "viewgraph/gnn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/metrics.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {
namespace {

constexpr double kProbabilityFloor = 1e-12;

using NeighborLists = std::vector<std::vector<std::pair<std::size_t, double>>>;

Eigen::MatrixXd glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  }
  return m;
}

// Per-layer values kept for the reverse pass.
struct LayerTrace {
  Eigen::MatrixXd messages;    // states * W^T
  Eigen::MatrixXd aggregates;  // mean of ReLU'd weighted messages
};

Eigen::MatrixXd run_layer(const Eigen::MatrixXd& states, const NeighborLists& neighbors,
                          const LayerParams& layer, LayerTrace* trace) {
  if (states.cols() != layer.message.cols()) {
    throw Error("forward_layer: state dimension " + std::to_string(states.cols()) +
                " does not match layer input " + std::to_string(layer.message.cols()));
  }
  const Eigen::Index n = states.rows();
  const Eigen::Index hidden = layer.message.rows();
  Eigen::MatrixXd messages = states * layer.message.transpose();
  Eigen::MatrixXd aggregates = Eigen::MatrixXd::Zero(n, hidden);
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto& list = neighbors[static_cast<std::size_t>(v)];
    if (list.empty()) continue;
    for (const auto& [q, w] : list) {
      aggregates.row(v) += (w * messages.row(static_cast<Eigen::Index>(q))).cwiseMax(0.0);
    }
    aggregates.row(v) /= static_cast<double>(list.size());
  }
  Eigen::MatrixXd concat(n, hidden + states.cols());
  concat << aggregates, states;
  Eigen::MatrixXd out = concat * layer.combine.transpose();
  if (trace != nullptr) {
    trace->messages = std::move(messages);
    trace->aggregates = std::move(aggregates);
  }
  return out;
}

struct HeadTrace {
  Eigen::VectorXd pooled;
  std::vector<Eigen::Index> max_nodes;  // argmax node per pooled max entry
  Eigen::VectorXd hidden_pre;
  Eigen::VectorXd hidden;
  Eigen::VectorXd probabilities;
};

HeadTrace run_head(const HeadParams& head, const Eigen::MatrixXd& states,
                   std::span<const std::size_t> nodes) {
  if (nodes.empty()) throw Error("forward_subgraph: idea has no nodes");
  const Eigen::Index hidden = states.cols();
  HeadTrace t;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd max = Eigen::VectorXd::Constant(hidden, -std::numeric_limits<double>::infinity());
  t.max_nodes.assign(static_cast<std::size_t>(hidden), 0);
  for (std::size_t node : nodes) {
    const auto row = states.row(static_cast<Eigen::Index>(node));
    mean += row.transpose();
    for (Eigen::Index k = 0; k < hidden; ++k) {
      if (row(k) > max(k)) {
        max(k) = row(k);
        t.max_nodes[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(node);
      }
    }
  }
  mean /= static_cast<double>(nodes.size());
  t.pooled.resize(2 * hidden);
  t.pooled << mean, max;
  t.hidden_pre = head.hidden_weight * t.pooled + head.hidden_bias.col(0);
  t.hidden = t.hidden_pre.cwiseMax(0.0);
  Eigen::VectorXd logits = head.output_weight * t.hidden + head.output_bias.col(0);
  const double shift = logits.maxCoeff();
  t.probabilities = (logits.array() - shift).exp();
  t.probabilities /= t.probabilities.sum();
  return t;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void check_inputs(const GnnModel& model, const GnnInputs& inputs) {
  if (static_cast<std::size_t>(inputs.features.cols()) != model.input_dim) {
    throw Error("model expects input dimension " + std::to_string(model.input_dim) +
                " but the graph provides " + std::to_string(inputs.features.cols()));
  }
  if (static_cast<std::size_t>(inputs.features.rows()) != inputs.neighbors.size()) {
    throw Error("gnn inputs: feature rows and neighbor lists differ");
  }
}

}  // namespace

void GnnConfig::validate() const {
  if (layers < 1) throw Error("gnn.layers must be at least 1");
  if (hidden < 1) throw Error("gnn.hidden must be at least 1");
  if (batch_size < 1) throw Error("gnn.batch_size must be at least 1");
  if (max_epochs < 1) throw Error("gnn.max_epochs must be at least 1");
  if (!(learning_rate >= 0.0)) throw Error("gnn.learning_rate must be non-negative");
}

std::vector<std::pair<std::string, Eigen::MatrixXd*>> GnnParameters::blocks() {
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.emplace_back("W" + std::to_string(l + 1), &layers[l].message);
    out.emplace_back("U" + std::to_string(l + 1), &layers[l].combine);
  }
  out.emplace_back("head.A", &head.hidden_weight);
  out.emplace_back("head.a", &head.hidden_bias);
  out.emplace_back("head.B", &head.output_weight);
  out.emplace_back("head.b", &head.output_bias);
  return out;
}

std::vector<std::pair<std::string, const Eigen::MatrixXd*>> GnnParameters::blocks() const {
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
  for (auto& [name, block] : const_cast<GnnParameters*>(this)->blocks()) {
    out.emplace_back(name, block);
  }
  return out;
}

GnnParameters GnnParameters::zeros_like() const {
  GnnParameters out = *this;
  for (auto& [name, block] : out.blocks()) block->setZero();
  return out;
}

std::size_t GnnParameters::size() const {
  std::size_t total = 0;
  for (const auto& [name, block] : blocks()) total += static_cast<std::size_t>(block->size());
  return total;
}

bool GnnParameters::operator==(const GnnParameters& other) const {
  const auto a = blocks();
  const auto b = other.blocks();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].second->rows() != b[i].second->rows() ||
        a[i].second->cols() != b[i].second->cols() || *a[i].second != *b[i].second) {
      return false;
    }
  }
  return true;
}

GnnModel GnnModel::initialize(const GnnConfig& config, std::size_t input_dim,
                              const LabelSet& labels) {
  config.validate();
  if (input_dim < 1) throw Error("gnn input dimension must be at least 1");
  GnnModel model;
  model.config = config;
  model.input_dim = input_dim;
  model.labels = labels;
  Rng rng(config.seed);
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerParams layer;
    layer.message = glorot(config.hidden, in, rng);
    layer.combine = glorot(config.hidden, config.hidden + in, rng);
    model.params.layers.push_back(std::move(layer));
    in = config.hidden;
  }
  auto& head = model.params.head;
  head.hidden_weight = glorot(config.hidden, 2 * config.hidden, rng);
  head.hidden_bias = Eigen::MatrixXd::Zero(config.hidden, 1);
  head.output_weight = glorot(labels.size(), config.hidden, rng);
  head.output_bias = Eigen::MatrixXd::Zero(labels.size(), 1);
  return model;
}

GnnInputs make_inputs(const ViewpointGraph& graph) {
  const std::size_t n = graph.node_count();
  const std::size_t dim = graph.features().dimension();
  GnnInputs inputs;
  inputs.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim + 1));
  inputs.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = graph.features().row(graph.nodes()[i].row);
    for (std::size_t c = 0; c < dim; ++c) {
      inputs.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
    inputs.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(dim)) =
        graph.nodes()[i].time;
    for (const auto& adj : graph.neighbors(i)) {
      inputs.neighbors[i].emplace_back(adj.node, adj.weight);
    }
  }
  return inputs;
}

Eigen::MatrixXd forward_layer(const Eigen::MatrixXd& states,
                              const NeighborLists& neighbors,
                              const LayerParams& layer) {
  return run_layer(states, neighbors, layer, nullptr);
}

std::vector<Eigen::MatrixXd> forward_all(const GnnModel& model, const GnnInputs& inputs) {
  check_inputs(model, inputs);
  std::vector<Eigen::MatrixXd> states;
  states.reserve(model.params.layers.size() + 1);
  states.push_back(inputs.features);
  for (const auto& layer : model.params.layers) {
    states.push_back(run_layer(states.back(), inputs.neighbors, layer, nullptr));
  }
  return states;
}

std::size_t argmax_probability(std::span<const double> probabilities) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i) {
    if (probabilities[i] > probabilities[best]) best = i;
  }
  return best;
}

SubgraphPrediction forward_subgraph(const GnnModel& model,
                                    const Eigen::MatrixXd& final_states,
                                    std::span<const std::size_t> nodes) {
  const HeadTrace trace = run_head(model.params.head, final_states, nodes);
  SubgraphPrediction out;
  out.probabilities = to_std(trace.probabilities);
  out.label = argmax_probability(out.probabilities);
  return out;
}

double cross_entropy(const std::vector<std::vector<double>>& probabilities,
                     std::span<const std::size_t> labels,
                     std::span<const double> weights) {
  if (probabilities.size() != labels.size() ||
      (!weights.empty() && weights.size() != labels.size())) {
    throw Error("cross_entropy: argument lengths differ");
  }
  double total = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += -w * std::log(std::max(probabilities[i].at(labels[i]), kProbabilityFloor));
    weight_sum += w;
  }
  return weight_sum > 0.0 ? total / weight_sum : 0.0;
}

double batch_loss(const GnnModel& model, const GnnInputs& inputs,
                  std::span<const LabeledSubgraph> batch) {
  const auto states = forward_all(model, inputs);
  std::vector<std::vector<double>> probabilities;
  std::vector<std::size_t> labels;
  std::vector<double> weights;
  for (const auto& item : batch) {
    probabilities.push_back(forward_subgraph(model, states.back(), item.nodes).probabilities);
    labels.push_back(item.label);
    weights.push_back(item.weight);
  }
  return cross_entropy(probabilities, labels, weights);
}

LossAndGradients backward(const GnnModel& model, const GnnInputs& inputs,
                          std::span<const LabeledSubgraph> batch) {
  check_inputs(model, inputs);
  const auto& params = model.params;
  const std::size_t layer_count = params.layers.size();

  std::vector<Eigen::MatrixXd> states;
  std::vector<LayerTrace> traces(layer_count);
  states.push_back(inputs.features);
  for (std::size_t l = 0; l < layer_count; ++l) {
    states.push_back(run_layer(states.back(), inputs.neighbors, params.layers[l], &traces[l]));
  }
  const Eigen::MatrixXd& final_states = states.back();

  LossAndGradients out;
  out.gradients = params.zeros_like();
  auto& grad = out.gradients;

  double weight_sum = 0.0;
  for (const auto& item : batch) weight_sum += item.weight;

  Eigen::MatrixXd d_states = Eigen::MatrixXd::Zero(final_states.rows(), final_states.cols());
  const Eigen::Index hidden = final_states.cols();
  for (const auto& item : batch) {
    if (item.label >= model.labels.size()) throw Error("backward: label out of range");
    const HeadTrace t = run_head(params.head, final_states, item.nodes);
    const double p_true = t.probabilities(static_cast<Eigen::Index>(item.label));
    if (weight_sum > 0.0) {
      out.loss += -item.weight * std::log(std::max(p_true, kProbabilityFloor)) / weight_sum;
    }
    if (!(weight_sum > 0.0) || item.weight == 0.0 || p_true < kProbabilityFloor) continue;

    const double scale = item.weight / weight_sum;
    Eigen::VectorXd d_logits = t.probabilities;
    d_logits(static_cast<Eigen::Index>(item.label)) -= 1.0;
    d_logits *= scale;

    grad.head.output_weight += d_logits * t.hidden.transpose();
    grad.head.output_bias.col(0) += d_logits;
    Eigen::VectorXd d_hidden = params.head.output_weight.transpose() * d_logits;
    d_hidden = (t.hidden_pre.array() > 0.0).select(d_hidden, 0.0);
    grad.head.hidden_weight += d_hidden * t.pooled.transpose();
    grad.head.hidden_bias.col(0) += d_hidden;
    const Eigen::VectorXd d_pooled = params.head.hidden_weight.transpose() * d_hidden;

    const double inv_count = 1.0 / static_cast<double>(item.nodes.size());
    for (std::size_t node : item.nodes) {
      d_states.row(static_cast<Eigen::Index>(node)) +=
          inv_count * d_pooled.head(hidden).transpose();
    }
    for (Eigen::Index k = 0; k < hidden; ++k) {
      d_states(t.max_nodes[static_cast<std::size_t>(k)], k) += d_pooled(hidden + k);
    }
  }

  for (std::size_t l = layer_count; l-- > 0;) {
    const auto& layer = params.layers[l];
    const Eigen::MatrixXd& in = states[l];
    const LayerTrace& trace = traces[l];
    Eigen::MatrixXd concat(in.rows(), trace.aggregates.cols() + in.cols());
    concat << trace.aggregates, in;
    grad.layers[l].combine += d_states.transpose() * concat;
    const Eigen::MatrixXd d_concat = d_states * layer.combine;
    const Eigen::Index h = trace.aggregates.cols();

    Eigen::MatrixXd d_messages = Eigen::MatrixXd::Zero(trace.messages.rows(), h);
    for (Eigen::Index v = 0; v < in.rows(); ++v) {
      const auto& list = inputs.neighbors[static_cast<std::size_t>(v)];
      if (list.empty()) continue;
      const Eigen::RowVectorXd d_agg =
          d_concat.row(v).head(h) / static_cast<double>(list.size());
      for (const auto& [q, w] : list) {
        const auto qi = static_cast<Eigen::Index>(q);
        const Eigen::RowVectorXd pre = w * trace.messages.row(qi);
        d_messages.row(qi) += w * (pre.array() > 0.0).select(d_agg, 0.0).matrix();
      }
    }
    grad.layers[l].message += d_messages.transpose() * in;
    d_states = d_concat.rightCols(in.cols()) + d_messages * layer.message;
  }

  for (const auto& [name, block] : grad.blocks()) {
    if (!block->allFinite()) throw Error("non-finite gradient in block " + name);
  }
  return out;
}

AdamState make_adam_state(const GnnParameters& params) {
  return {params.zeros_like(), params.zeros_like()};
}

double scheduled_learning_rate(double initial, std::size_t epoch,
                               std::size_t max_epochs) {
  if (max_epochs == 0 || epoch >= max_epochs) return 0.0;
  return initial * (1.0 - static_cast<double>(epoch) / static_cast<double>(max_epochs));
}

void adam_step(GnnParameters& params, const Gradients& gradients, AdamState& state,
               std::size_t step, double learning_rate, const AdamOptions& options) {
  if (step < 1) throw Error("adam_step: step index starts at 1");
  const double t = static_cast<double>(step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  auto p = params.blocks();
  const auto g = gradients.blocks();
  auto m = state.first_moment.blocks();
  auto v = state.second_moment.blocks();
  for (std::size_t i = 0; i < p.size(); ++i) {
    Eigen::MatrixXd& mi = *m[i].second;
    Eigen::MatrixXd& vi = *v[i].second;
    const Eigen::MatrixXd& gi = *g[i].second;
    mi = options.beta1 * mi + (1.0 - options.beta1) * gi;
    vi = options.beta2 * vi + (1.0 - options.beta2) * gi.cwiseProduct(gi);
    if (learning_rate == 0.0) continue;
    const Eigen::ArrayXXd m_hat = mi.array() / correction1;
    const Eigen::ArrayXXd v_hat = vi.array() / correction2;
    p[i].second->array() -= learning_rate * m_hat / (v_hat.sqrt() + options.epsilon);
  }
}

namespace {

struct EvalSet {
  std::vector<LabeledSubgraph> items;
};

double accuracy_of(const GnnModel& model, const Eigen::MatrixXd& final_states,
                   const std::vector<LabeledSubgraph>& items) {
  if (items.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& item : items) {
    if (forward_subgraph(model, final_states, item.nodes).label == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

double macro_f1_of(const GnnModel& model, const Eigen::MatrixXd& final_states,
                   const std::vector<LabeledSubgraph>& items) {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> truth;
  for (const auto& item : items) {
    predicted.push_back(forward_subgraph(model, final_states, item.nodes).label);
    truth.push_back(item.label);
  }
  return macro_metrics(confusion(predicted, truth, model.labels.size())).macro_f1;
}

}  // namespace

TrainResult train(const GnnConfig& config, const ViewpointGraph& graph,
                  const Corpus& corpus, std::span<const NegativeSample> negatives) {
  config.validate();
  std::vector<LabeledSubgraph> train_items;
  std::vector<LabeledSubgraph> validation_items;
  for (const auto& subgraph : graph.subgraphs()) {
    const Idea* idea = corpus.find(subgraph.idea);
    if (idea == nullptr || !idea->label) continue;
    if (idea->split == Split::kTrain) {
      train_items.push_back({subgraph.nodes, *idea->label, 1.0});
    } else if (idea->split == Split::kValidation) {
      validation_items.push_back({subgraph.nodes, *idea->label, 1.0});
    }
  }
  if (train_items.empty()) throw Error("train: no labeled train ideas in the graph");
  for (const auto& negative : negatives) {
    if (negative.split != Split::kTrain) continue;
    const Subgraph* subgraph = graph.find_subgraph(negative.id);
    if (subgraph == nullptr) {
      throw Error("train: negative \"" + negative.id + "\" is not in the graph");
    }
    if (negative.label >= corpus.labels.size()) {
      throw Error("train: negative \"" + negative.id + "\" has an invalid label");
    }
    train_items.push_back({subgraph->nodes, negative.label, 1.0});
  }
  if (config.class_weights) {
    std::vector<double> counts(corpus.labels.size(), 0.0);
    for (const auto& item : train_items) counts[item.label] += 1.0;
    const double present = static_cast<double>(
        std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }));
    for (auto& item : train_items) {
      item.weight = static_cast<double>(train_items.size()) / (present * counts[item.label]);
    }
  }

  const GnnInputs inputs = make_inputs(graph);
  TrainResult result;
  result.model = GnnModel::initialize(config, static_cast<std::size_t>(inputs.features.cols()),
                                      corpus.labels);
  GnnModel& model = result.model;
  AdamState adam = make_adam_state(model.params);
  Rng rng(derive_seed(config.seed, "gnn.batches"));

  std::optional<GnnParameters> best_params;
  std::size_t step = 0;
  std::vector<std::size_t> order(train_items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = scheduled_learning_rate(config.learning_rate, epoch, config.max_epochs);
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::vector<LabeledSubgraph> batch;
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_items[order[i]]);
      auto step_result = backward(model, inputs, batch);
      loss_sum += step_result.loss * static_cast<double>(batch.size());
      adam_step(model.params, step_result.gradients, adam, ++step, lr);
    }

    const auto states = forward_all(model, inputs);
    EpochLog entry;
    entry.epoch = epoch + 1;
    entry.learning_rate = lr;
    entry.loss = loss_sum / static_cast<double>(order.size());
    entry.train_accuracy = accuracy_of(model, states.back(), train_items);
    if (!validation_items.empty()) {
      entry.validation_macro_f1 = macro_f1_of(model, states.back(), validation_items);
      if (!result.best_validation_macro_f1 ||
          *entry.validation_macro_f1 > *result.best_validation_macro_f1) {
        result.best_validation_macro_f1 = entry.validation_macro_f1;
        result.best_epoch = entry.epoch;
        best_params = model.params;
      }
    }
    result.log.push_back(entry);
  }
  if (best_params) {
    model.params = std::move(*best_params);
  } else {
    result.best_epoch = config.max_epochs;
  }
  return result;
}

std::vector<SubgraphPrediction> predict(const GnnModel& model, const ViewpointGraph& graph,
                                        const std::vector<std::string>& ideas) {
  const GnnInputs inputs = make_inputs(graph);
  const auto states = forward_all(model, inputs);
  std::vector<SubgraphPrediction> out;
  out.reserve(ideas.size());
  for (const auto& id : ideas) {
    const Subgraph* subgraph = graph.find_subgraph(id);
    if (subgraph == nullptr || subgraph->nodes.empty()) {
      throw Error("predict: idea \"" + id + "\" has no nodes in the graph");
    }
    SubgraphPrediction p = forward_subgraph(model, states.back(), subgraph->nodes);
    p.idea = id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SubgraphPrediction> predict_split(const GnnModel& model,
                                              const ViewpointGraph& graph, Split split) {
  std::vector<std::string> ideas;
  for (const auto& s : graph.subgraphs()) {
    if (s.split == split) ideas.push_back(s.idea);
  }
  return predict(model, graph, ideas);
}

namespace {

nlohmann::json config_to_json(const GnnConfig& c) {
  return {{"layers", c.layers},         {"hidden", c.hidden},
          {"batch_size", c.batch_size}, {"max_epochs", c.max_epochs},
          {"learning_rate", c.learning_rate}, {"seed", c.seed},
          {"class_weights", c.class_weights}};
}

GnnConfig config_from_json(const nlohmann::json& j) {
  GnnConfig c;
  c.layers = j.at("layers").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.class_weights = j.value("class_weights", false);
  return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const GnnModel& model = checkpoint.model;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& [name, block] : model.params.blocks()) {
    blocks.push_back({{"name", name}, {"rows", block->rows()}, {"cols", block->cols()}});
  }
  nlohmann::json header = {
      {"format", "viewgraph-gnn/1"},
      {"config", config_to_json(model.config)},
      {"labels", model.labels.names()},
      {"input_dim", model.input_dim},
      {"epoch", checkpoint.epoch},
      {"validation_score", checkpoint.validation_score
                               ? nlohmann::json(*checkpoint.validation_score)
                               : nlohmann::json()},
      {"blocks", blocks}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& [name, block] : model.params.blocks()) {
    for (Eigen::Index r = 0; r < block->rows(); ++r) {
      for (Eigen::Index c = 0; c < block->cols(); ++c) {
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>((*block)(r, c)));
        const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                               static_cast<char>((bits >> 16) & 0xff),
                               static_cast<char>((bits >> 24) & 0xff)};
        out.write(bytes, 4);
      }
    }
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  Checkpoint checkpoint;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != "viewgraph-gnn/1") {
      throw Error(path.string() + ": unsupported checkpoint format");
    }
    const LabelSet labels(header.at("labels").get<std::vector<std::string>>());
    checkpoint.model = GnnModel::initialize(config_from_json(header.at("config")),
                                            header.at("input_dim").get<std::size_t>(), labels);
    checkpoint.epoch = header.at("epoch").get<std::size_t>();
    if (!header.at("validation_score").is_null()) {
      checkpoint.validation_score = header.at("validation_score").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": bad checkpoint header: " + e.what());
  }
  auto blocks = checkpoint.model.params.blocks();
  const auto& described = header.at("blocks");
  if (described.size() != blocks.size()) {
    throw Error(path.string() + ": block count disagrees with the configuration");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto& block = *blocks[i].second;
    if (described[i].at("name").get<std::string>() != blocks[i].first ||
        described[i].at("rows").get<Eigen::Index>() != block.rows() ||
        described[i].at("cols").get<Eigen::Index>() != block.cols()) {
      throw Error(path.string() + ": block " + blocks[i].first + " has an unexpected shape");
    }
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        unsigned char bytes[4];
        if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
          throw Error(path.string() + ": truncated parameter blob");
        }
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                                   (static_cast<std::uint32_t>(bytes[1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[3]) << 24);
        block(r, c) = static_cast<double>(std::bit_cast<float>(bits));
        if (!std::isfinite(block(r, c))) {
          throw Error(path.string() + ": non-finite parameter in " + blocks[i].first);
        }
      }
    }
  }
  return checkpoint;
}

}  // namespace viewgraph
