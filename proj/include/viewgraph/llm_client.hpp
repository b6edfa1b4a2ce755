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

// Viewpoint and relation extraction through a chat-completion backend.
//
// Completions follow a bracket grammar:
//
//   [Sentence 1]
//   <sentence text>
//   [Extracted Viewpoints in Sentence 1]
//   [<viewpoint>]
//   [<viewpoint>]
//   [Sentence 2]
//   ...
//
// and, for relations, one item per pair:
//
//   {[<viewpoint>], [<connector>], [supporting|opposing], [<viewpoint>]}

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viewgraph/dataset.hpp"
#include "viewgraph/http.hpp"

namespace viewgraph {

struct PromptTemplate {
  std::string name;
  std::string body;

  // Substitutes {placeholder} markers. Throws when a marker has no binding
  // or a lowercase {identifier} marker survives rendering.
  std::string render(const std::map<std::string, std::string>& bindings) const;

  static PromptTemplate viewpoint_extraction();
  static PromptTemplate relation_extraction();
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  // Currency units per million tokens.
  double price_per_million = 0.0;

  std::int64_t total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

enum class Polarity { kSupporting, kOpposing };

struct ViewpointPair {
  std::string left;
  std::string connector;
  Polarity polarity = Polarity::kSupporting;
  std::string right;
  // Positions of the endpoints in the input viewpoint list.
  std::size_t left_index = 0;
  std::size_t right_index = 0;

  bool operator==(const ViewpointPair&) const = default;
};

// Identifies a call to the backend; the mock keys its output on it.
struct CallContext {
  std::string template_name;
  std::string idea_id;
};

struct Completion {
  std::string text;
  // Present when the provider reported usage metadata.
  std::optional<TokenUsage> usage;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual Completion complete(const std::string& prompt,
                              const CallContext& context) const = 0;
  virtual double price_per_million() const = 0;
};

enum class BackendKind { kMock, kRemote };

struct LlmBackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;
  std::string model;
  double temperature = 0.1;
  RetryPolicy retry;
  std::string api_key;
  double price_per_million = 0.20;
  std::size_t max_in_flight = 4;
  std::uint64_t mock_seed = 0;

  // Throws on temperature outside [0, 2] or a remote config without endpoint.
  void validate() const;
};

// Offline backend. Its completion is a pure function of the template name,
// the prompt and the seed: it splits the last abstract in the prompt into
// sentences and every `;`-separated clause into its own viewpoint.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(std::uint64_t seed = 0, double price = 0.20)
      : seed_(seed), price_(price) {}

  Completion complete(const std::string& prompt,
                      const CallContext& context) const override;
  double price_per_million() const override { return price_; }

 private:
  std::uint64_t seed_;
  double price_;
};

// Chat-completions client: POST {model, messages, temperature} and read
// choices[0].message.content plus usage.{prompt,completion}_tokens.
class RemoteChatBackend final : public ChatBackend {
 public:
  explicit RemoteChatBackend(LlmBackendConfig config);

  Completion complete(const std::string& prompt,
                      const CallContext& context) const override;
  double price_per_million() const override {
    return config_.price_per_million;
  }

 private:
  LlmBackendConfig config_;
};

std::unique_ptr<ChatBackend> make_chat_backend(const LlmBackendConfig& config);

// Whitespace-delimited token count, the fallback when usage is missing.
std::int64_t count_words(std::string_view text);

std::vector<std::string> parse_viewpoint_response(const std::string& raw);

// Inverse of parse_viewpoint_response: emits `sentence_size` viewpoints per
// sentence block.
std::string render_viewpoint_response(const std::vector<std::string>& viewpoints,
                                      std::size_t sentence_size = 1);

struct RelationParse {
  std::vector<ViewpointPair> pairs;
  // Pairs dropped because an endpoint matched no input viewpoint.
  std::size_t dropped = 0;
};

RelationParse parse_relation_response(const std::string& raw,
                                      const std::vector<std::string>& viewpoints);

struct ViewpointExtraction {
  std::vector<std::string> viewpoints;
  TokenUsage usage;
};

ViewpointExtraction extract_viewpoints(const Idea& idea,
                                       const ChatBackend& backend,
                                       const PromptTemplate& prompt);

struct RelationExtraction {
  std::vector<ViewpointPair> pairs;
  TokenUsage usage;
  std::size_t warnings = 0;
};

RelationExtraction extract_relations(const std::vector<std::string>& viewpoints,
                                     const Idea& idea,
                                     const ChatBackend& backend,
                                     const PromptTemplate& prompt);

// Runs extract_viewpoints over many ideas with at most `max_in_flight`
// concurrent calls. Results come back in input order.
std::vector<ViewpointExtraction> extract_viewpoints_batch(
    const std::vector<const Idea*>& ideas, const ChatBackend& backend,
    const PromptTemplate& prompt, std::size_t max_in_flight);

struct TokenCost {
  double avg_tokens = 0.0;
  double avg_cost = 0.0;
};

// Mean tokens per evaluation and mean cost, cost = tokens * price / 1e6.
TokenCost token_cost(const std::vector<TokenUsage>& usages);

// Corpus-level aggregates reported after extraction.
struct ExtractionSummary {
  std::size_t ideas = 0;
  double avg_idea_words = 0.0;
  double avg_viewpoints = 0.0;
  double avg_viewpoint_words = 0.0;
  // Only meaningful when relation extraction ran.
  double avg_pairs = 0.0;
  double avg_pair_density = 0.0;
};

ExtractionSummary summarize_extraction(
    const std::vector<std::string>& idea_texts,
    const std::vector<std::vector<std::string>>& viewpoints,
    const std::vector<std::vector<ViewpointPair>>& pairs);

}  // namespace viewgraph
