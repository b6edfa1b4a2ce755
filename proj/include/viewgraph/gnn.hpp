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

// Weighted message-passing network over the viewpoint-graph.
//
// Layer l maps node states h to
//
//   h_v' = U * concat(mean_{q in N(v)} ReLU(w_vq * (W * h_q)), h_v)
//
// with the mean over an empty neighborhood taken as the zero vector and no
// non-linearity between layers. An idea is classified from its final node
// states: softmax(MLP(concat(mean_v h_v, max_v h_v))), where the MLP is
// ReLU(A x + a) followed by B z + b.
//
// Training minimizes the (optionally class-weighted) mean cross-entropy with
// Adam and a learning rate that decays linearly to zero over max_epochs.
// Gradients are computed by a hand-written reverse pass.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/graph.hpp"
#include "viewgraph/novelty.hpp"

namespace viewgraph {

struct GnnConfig {
  std::size_t layers = 2;
  std::size_t hidden = 64;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 1000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  // Inverse-frequency weighting of the loss.
  bool class_weights = false;

  void validate() const;
  bool operator==(const GnnConfig&) const = default;
};

struct LayerParams {
  Eigen::MatrixXd message;  // W: hidden x in
  Eigen::MatrixXd combine;  // U: hidden x (hidden + in)
};

struct HeadParams {
  Eigen::MatrixXd hidden_weight;  // A: hidden x 2*hidden
  Eigen::MatrixXd hidden_bias;    // a: hidden x 1
  Eigen::MatrixXd output_weight;  // B: labels x hidden
  Eigen::MatrixXd output_bias;    // b: labels x 1
};

// Model parameters, also used as the gradient container.
struct GnnParameters {
  std::vector<LayerParams> layers;
  HeadParams head;

  // Blocks in checkpoint order: W1, U1, W2, U2, ..., A, a, B, b.
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> blocks();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> blocks() const;

  GnnParameters zeros_like() const;
  std::size_t size() const;
  bool operator==(const GnnParameters& other) const;
};

using Gradients = GnnParameters;

struct GnnModel {
  GnnConfig config;
  std::size_t input_dim = 0;
  LabelSet labels;
  GnnParameters params;

  // Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases, drawn from
  // Rng(config.seed) in block order.
  static GnnModel initialize(const GnnConfig& config, std::size_t input_dim,
                             const LabelSet& labels);
};

// Node features (embedding followed by the time feature) and raw edge weights.
struct GnnInputs {
  Eigen::MatrixXd features;  // nodes x input_dim
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
};

GnnInputs make_inputs(const ViewpointGraph& graph);

// One layer over every node; states are row vectors.
Eigen::MatrixXd forward_layer(
    const Eigen::MatrixXd& states,
    const std::vector<std::vector<std::pair<std::size_t, double>>>& neighbors,
    const LayerParams& layer);

// All layers; element 0 is the input features.
std::vector<Eigen::MatrixXd> forward_all(const GnnModel& model,
                                         const GnnInputs& inputs);

struct SubgraphPrediction {
  std::string idea;
  std::vector<double> probabilities;
  std::size_t label = 0;
};

// Pools the idea's final node states and applies the head.
SubgraphPrediction forward_subgraph(const GnnModel& model,
                                    const Eigen::MatrixXd& final_states,
                                    std::span<const std::size_t> nodes);

// Ties resolve to the lowest index.
std::size_t argmax_probability(std::span<const double> probabilities);

struct LabeledSubgraph {
  std::vector<std::size_t> nodes;
  std::size_t label = 0;
  double weight = 1.0;
};

// Weighted mean of -log(max(p[label], 1e-12)); zero when all weights are zero.
double cross_entropy(const std::vector<std::vector<double>>& probabilities,
                     std::span<const std::size_t> labels,
                     std::span<const double> weights = {});

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
};

// Forward pass over the whole graph, loss on `batch`, exact reverse pass.
// Throws if any gradient block is non-finite.
LossAndGradients backward(const GnnModel& model, const GnnInputs& inputs,
                          std::span<const LabeledSubgraph> batch);

// Loss only; used by the finite-difference checks.
double batch_loss(const GnnModel& model, const GnnInputs& inputs,
                  std::span<const LabeledSubgraph> batch);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  GnnParameters first_moment;
  GnnParameters second_moment;
};

AdamState make_adam_state(const GnnParameters& params);

// lr0 * (1 - epoch / max_epochs).
double scheduled_learning_rate(double initial, std::size_t epoch,
                               std::size_t max_epochs);

// Bias-corrected Adam update; `step` counts from 1.
void adam_step(GnnParameters& params, const Gradients& gradients,
               AdamState& state, std::size_t step, double learning_rate,
               const AdamOptions& options = {});

struct EpochLog {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> validation_macro_f1;
};

struct TrainResult {
  GnnModel model;
  std::vector<EpochLog> log;
  // Epoch (1-based) whose parameters were returned.
  std::size_t best_epoch = 0;
  std::optional<double> best_validation_macro_f1;
};

// Transductive training: every node takes part in message passing, the loss
// only sees labeled train subgraphs and the train-split negatives (which must
// already be integrated into `graph`).
TrainResult train(const GnnConfig& config, const ViewpointGraph& graph,
                  const Corpus& corpus,
                  std::span<const NegativeSample> negatives = {});

// Predictions for the named ideas, in the given order.
std::vector<SubgraphPrediction> predict(const GnnModel& model,
                                        const ViewpointGraph& graph,
                                        const std::vector<std::string>& ideas);

// Predictions for every subgraph recorded under `split`.
std::vector<SubgraphPrediction> predict_split(const GnnModel& model,
                                              const ViewpointGraph& graph,
                                              Split split);

struct Checkpoint {
  GnnModel model;
  std::size_t epoch = 0;
  std::optional<double> validation_score;
};

// A JSON header line followed by the parameter blocks as little-endian
// float32, each block row-major, in GnnParameters::blocks() order.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace viewgraph
