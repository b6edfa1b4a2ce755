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

#include "viewgraph/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "viewgraph/error.hpp"
#include "viewgraph/random.hpp"

namespace viewgraph {
namespace {

constexpr std::string_view kAbstractStart = "[The Start of Abstract]";
constexpr std::string_view kAbstractEnd = "[The End of Abstract]";
constexpr std::string_view kViewpointsStart = "[The Start of Extracted Viewpoints]";
constexpr std::string_view kViewpointsEnd = "[The End of Extracted Viewpoints]";

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

// Lowercased, whitespace runs collapsed to one space, trimmed.
std::string normalize_for_match(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

struct BracketToken {
  std::string content;
  std::size_t begin = 0;  // position of '['
  std::size_t end = 0;    // one past ']'
};

// Bracketed spans of `text` in order. A '[' opened before the previous one
// closed is a nested bracket and rejected; an unclosed trailing '[' ends the
// scan.
std::vector<BracketToken> bracket_tokens(const std::string& text,
                                         std::size_t from, std::size_t to) {
  std::vector<BracketToken> tokens;
  std::size_t pos = from;
  while (pos < to) {
    const auto open = text.find('[', pos);
    if (open == std::string::npos || open >= to) break;
    const auto close = text.find(']', open + 1);
    if (close == std::string::npos || close >= to) break;
    const auto inner_open = text.find('[', open + 1);
    if (inner_open != std::string::npos && inner_open < close) {
      throw ResponseParseError(
          "nested '[' inside a bracketed item at offset " +
              std::to_string(inner_open),
          text);
    }
    tokens.push_back({text.substr(open + 1, close - open - 1), open, close + 1});
    pos = close + 1;
  }
  return tokens;
}

const std::regex& extracted_marker() {
  static const std::regex re(R"(^\s*extracted\s+viewpoints\b.*$)",
                             std::regex::icase);
  return re;
}

const std::regex& sentence_marker() {
  static const std::regex re(R"(^\s*sentence\s+\d+\s*$)", std::regex::icase);
  return re;
}

const std::regex& frame_marker() {
  static const std::regex re(R"(^\s*the\s+(start|end)\s+of\s+(abstract|extracted\s+viewpoints|viewpoint\s+pairs)\s*$)",
                             std::regex::icase);
  return re;
}

// Text between the last occurrence of `start` and the following `end`.
std::optional<std::string> last_block(const std::string& text,
                                      std::string_view start,
                                      std::string_view end) {
  const auto begin = text.rfind(start);
  if (begin == std::string::npos) return std::nullopt;
  const auto body = begin + start.size();
  const auto stop = text.find(end, body);
  return text.substr(body, (stop == std::string::npos ? text.size() : stop) - body);
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    current.push_back(c == '\n' || c == '\r' || c == '\t' ? ' ' : c);
    const bool terminal = c == '.' || c == '!' || c == '?';
    const bool boundary =
        i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (terminal && boundary) {
      if (auto s = trim(current); !s.empty()) sentences.push_back(std::move(s));
      current.clear();
    }
  }
  if (auto s = trim(current); !s.empty()) sentences.push_back(std::move(s));
  return sentences;
}

std::string sanitize_brackets(std::string text) {
  for (auto& c : text) {
    if (c == '[') c = '(';
    if (c == ']') c = ')';
    if (c == '{') c = '(';
    if (c == '}') c = ')';
  }
  return text;
}

std::string mock_viewpoints(const std::string& prompt) {
  const auto abstract = last_block(prompt, kAbstractStart, kAbstractEnd);
  std::ostringstream out;
  std::size_t index = 0;
  for (const auto& sentence : split_sentences(abstract.value_or(""))) {
    const std::string clean = sanitize_brackets(sentence);
    ++index;
    out << "[Sentence " << index << "]\n" << clean << "\n";
    out << "[Extracted Viewpoints in Sentence " << index << "]\n";
    std::stringstream clauses(clean);
    std::string clause;
    while (std::getline(clauses, clause, ';')) {
      clause = trim(clause);
      if (clause.empty()) continue;
      const char last = clause.back();
      if (last != '.' && last != '!' && last != '?') clause.push_back('.');
      out << "[" << clause << "]\n";
    }
  }
  return out.str();
}

std::string mock_relations(const std::string& prompt, std::uint64_t seed) {
  const auto block = last_block(prompt, kViewpointsStart, kViewpointsEnd);
  std::vector<std::string> viewpoints;
  if (block) {
    for (auto& token : bracket_tokens(*block, 0, block->size())) {
      if (auto t = trim(token.content); !t.empty()) viewpoints.push_back(t);
    }
  }
  std::ostringstream out;
  out << "[The Start of Viewpoint Pairs]\n";
  for (std::size_t i = 0; i + 1 < viewpoints.size(); ++i) {
    const std::uint64_t h = mix64(seed ^ fnv1a64(viewpoints[i]) ^ (i * 0x9e37ULL));
    if (h % 3 != 0) continue;
    const bool opposing = (h >> 8) % 2 == 1;
    out << "{[" << viewpoints[i] << "], [" << (opposing ? "however" : "therefore")
        << "], [" << (opposing ? "opposing" : "supporting") << "], ["
        << viewpoints[i + 1] << "]}\n";
  }
  out << "[The End of Viewpoint Pairs]\n";
  return out.str();
}

}  // namespace

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& bindings) const {
  static const std::regex placeholder(R"(\{([a-z_]+)\})");
  std::string out;
  auto begin = std::sregex_iterator(body.begin(), body.end(), placeholder);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& match = *it;
    const auto found = bindings.find(match[1].str());
    if (found == bindings.end()) {
      throw Error("template " + name + ": unbound placeholder {" +
                  match[1].str() + "}");
    }
    out.append(body, last, static_cast<std::size_t>(match.position(0)) - last);
    out.append(found->second);
    last = static_cast<std::size_t>(match.position(0) + match.length(0));
  }
  out.append(body, last, std::string::npos);
  return out;
}

PromptTemplate PromptTemplate::viewpoint_extraction() {
  return {"viewpoint_extraction",
          "Split the research abstract below into its sentences. For every "
          "sentence, list each self-contained claim it makes: a result, a "
          "method, a motivation or a stated fact. Keep claims atomic, so that "
          "none of them could be split further. Resolve pronouns and restore "
          "omitted subjects so that each claim reads correctly on its own.\n\n"
          "Answer in exactly this layout, one bracketed claim per line:\n\n"
          "[Sentence 1]\n"
          "<the first sentence>\n"
          "[Extracted Viewpoints in Sentence 1]\n"
          "[<first claim of sentence 1>]\n"
          "[<second claim of sentence 1>]\n"
          "[Sentence 2]\n"
          "...\n\n"
          "Worked example.\n\n"
          "[The Start of Abstract]\n"
          "Sparse attention cuts memory use; it also speeds up decoding.\n"
          "[The End of Abstract]\n\n"
          "[Sentence 1]\n"
          "Sparse attention cuts memory use; it also speeds up decoding.\n"
          "[Extracted Viewpoints in Sentence 1]\n"
          "[Sparse attention cuts memory use.]\n"
          "[Sparse attention speeds up decoding.]\n\n"
          "Now the real input.\n\n"
          "[The Start of Abstract]\n"
          "{abstract}\n"
          "[The End of Abstract]\n"};
}

PromptTemplate PromptTemplate::relation_extraction() {
  return {"relation_extraction",
          "Below are a research abstract and the claims already extracted "
          "from it. Find the pairs of claims that are logically linked. For "
          "each pair, name a short connective word that fits the link and "
          "classify the link as supporting (cause, consequence, example, "
          "elaboration) or opposing (contrast, contradiction, limitation). Use "
          "the abstract as context when deciding.\n\n"
          "Write one pair per line, copying both claims verbatim:\n"
          "{[<claim A>], [<connective>], [supporting or opposing], [<claim B>]}\n"
          "Write nothing else. If no pair is linked, write an empty list.\n\n"
          "[The Start of Abstract]\n"
          "{abstract}\n"
          "[The End of Abstract]\n\n"
          "[The Start of Extracted Viewpoints]\n"
          "{viewpoints}"
          "[The End of Extracted Viewpoints]\n"};
}

void LlmBackendConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error("temperature must lie in [0, 2]");
  }
  if (price_per_million < 0.0) throw Error("price must be non-negative");
  if (kind == BackendKind::kRemote && endpoint.empty()) {
    throw Error("remote backend needs an endpoint");
  }
  if (max_in_flight == 0) throw Error("max_in_flight must be at least 1");
}

Completion MockChatBackend::complete(const std::string& prompt,
                                     const CallContext& context) const {
  if (context.template_name == "relation_extraction") {
    return {mock_relations(prompt, seed_), std::nullopt};
  }
  return {mock_viewpoints(prompt), std::nullopt};
}

RemoteChatBackend::RemoteChatBackend(LlmBackendConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

Completion RemoteChatBackend::complete(const std::string& prompt,
                                       const CallContext&) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature}};
  HttpHeaders headers;
  if (!config_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  }
  const nlohmann::json reply =
      post_json(config_.endpoint, body, headers, config_.retry);

  Completion completion;
  try {
    completion.text =
        reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ResponseParseError("chat reply lacks choices[0].message.content",
                             reply.dump());
  }
  if (auto it = reply.find("usage"); it != reply.end() && it->is_object()) {
    const auto prompt_tokens = it->find("prompt_tokens");
    const auto completion_tokens = it->find("completion_tokens");
    if (prompt_tokens != it->end() && completion_tokens != it->end() &&
        prompt_tokens->is_number_integer() &&
        completion_tokens->is_number_integer()) {
      completion.usage = TokenUsage{prompt_tokens->get<std::int64_t>(),
                                    completion_tokens->get<std::int64_t>(),
                                    config_.price_per_million};
    }
  }
  return completion;
}

std::unique_ptr<ChatBackend> make_chat_backend(const LlmBackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::kRemote) {
    return std::make_unique<RemoteChatBackend>(config);
  }
  return std::make_unique<MockChatBackend>(config.mock_seed,
                                           config.price_per_million);
}

std::int64_t count_words(std::string_view text) {
  std::int64_t words = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

std::vector<std::string> parse_viewpoint_response(const std::string& raw) {
  bool found_marker = false;
  bool collecting = false;
  std::vector<std::string> viewpoints;
  for (const auto& token : bracket_tokens(raw, 0, raw.size())) {
    if (std::regex_match(token.content, extracted_marker())) {
      found_marker = true;
      collecting = true;
    } else if (std::regex_match(token.content, sentence_marker()) ||
               std::regex_match(token.content, frame_marker())) {
      collecting = false;
    } else if (collecting) {
      if (auto text = trim(token.content); !text.empty()) {
        viewpoints.push_back(std::move(text));
      }
    }
  }
  if (!found_marker) {
    throw ResponseParseError("no [Extracted Viewpoints ...] marker in completion",
                             raw);
  }
  return viewpoints;
}

std::string render_viewpoint_response(const std::vector<std::string>& viewpoints,
                                      std::size_t sentence_size) {
  sentence_size = std::max<std::size_t>(sentence_size, 1);
  std::ostringstream out;
  if (viewpoints.empty()) {
    out << "[Sentence 1]\n\n[Extracted Viewpoints in Sentence 1]\n";
    return out.str();
  }
  std::size_t sentence = 0;
  for (std::size_t start = 0; start < viewpoints.size(); start += sentence_size) {
    const std::size_t stop = std::min(viewpoints.size(), start + sentence_size);
    ++sentence;
    out << "[Sentence " << sentence << "]\n";
    for (std::size_t i = start; i < stop; ++i) {
      out << (i == start ? "" : " ") << viewpoints[i];
    }
    out << "\n[Extracted Viewpoints in Sentence " << sentence << "]\n";
    for (std::size_t i = start; i < stop; ++i) out << "[" << viewpoints[i] << "]\n";
  }
  return out.str();
}

RelationParse parse_relation_response(const std::string& raw,
                                      const std::vector<std::string>& viewpoints) {
  std::vector<std::string> keys;
  keys.reserve(viewpoints.size());
  for (const auto& v : viewpoints) keys.push_back(normalize_for_match(v));
  auto lookup = [&](const std::string& text) -> std::optional<std::size_t> {
    const auto key = normalize_for_match(text);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == key) return i;
    }
    return std::nullopt;
  };

  RelationParse result;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find('{', pos);
    if (open == std::string::npos) break;
    const auto close = raw.find('}', open + 1);
    if (close == std::string::npos) break;
    pos = close + 1;

    std::vector<BracketToken> fields;
    try {
      fields = bracket_tokens(raw, open + 1, close);
    } catch (const ResponseParseError&) {
      ++result.dropped;
      continue;
    }
    if (fields.size() != 4) {
      ++result.dropped;
      continue;
    }
    std::string polarity = normalize_for_match(fields[2].content);
    polarity.erase(std::remove(polarity.begin(), polarity.end(), '"'),
                   polarity.end());
    const auto left = lookup(fields[0].content);
    const auto right = lookup(fields[3].content);
    if (!left || !right || *left == *right ||
        (polarity != "supporting" && polarity != "opposing")) {
      ++result.dropped;
      continue;
    }
    const auto key = std::minmax(*left, *right);
    if (!seen.insert(key).second) continue;
    result.pairs.push_back({viewpoints[*left], trim(fields[1].content),
                            polarity == "opposing" ? Polarity::kOpposing
                                                   : Polarity::kSupporting,
                            viewpoints[*right], *left, *right});
  }
  return result;
}

namespace {

TokenUsage usage_or_fallback(const Completion& completion,
                             const std::string& prompt, double price) {
  if (completion.usage) {
    TokenUsage usage = *completion.usage;
    usage.price_per_million = price;
    return usage;
  }
  return {count_words(prompt), count_words(completion.text), price};
}

}  // namespace

ViewpointExtraction extract_viewpoints(const Idea& idea,
                                       const ChatBackend& backend,
                                       const PromptTemplate& prompt) {
  if (idea.text.empty()) throw Error("idea \"" + idea.id + "\" has empty text");
  const std::string rendered =
      prompt.render({{"title", idea.title}, {"abstract", idea.text}});
  const Completion completion = backend.complete(rendered, {prompt.name, idea.id});
  ViewpointExtraction out;
  out.viewpoints = parse_viewpoint_response(completion.text);
  if (out.viewpoints.empty()) {
    throw ResponseParseError("completion for \"" + idea.id + "\" has no viewpoints",
                             completion.text);
  }
  out.usage = usage_or_fallback(completion, rendered, backend.price_per_million());
  return out;
}

RelationExtraction extract_relations(const std::vector<std::string>& viewpoints,
                                     const Idea& idea,
                                     const ChatBackend& backend,
                                     const PromptTemplate& prompt) {
  if (viewpoints.size() < 2) {
    throw Error("relation extraction needs at least 2 viewpoints");
  }
  std::string listed;
  for (const auto& v : viewpoints) listed += "[" + v + "]\n";
  const std::string rendered = prompt.render(
      {{"title", idea.title}, {"abstract", idea.text}, {"viewpoints", listed}});
  const Completion completion = backend.complete(rendered, {prompt.name, idea.id});
  RelationParse parsed = parse_relation_response(completion.text, viewpoints);
  return {std::move(parsed.pairs),
          usage_or_fallback(completion, rendered, backend.price_per_million()),
          parsed.dropped};
}

std::vector<ViewpointExtraction> extract_viewpoints_batch(
    const std::vector<const Idea*>& ideas, const ChatBackend& backend,
    const PromptTemplate& prompt, std::size_t max_in_flight) {
  max_in_flight = std::max<std::size_t>(max_in_flight, 1);
  std::vector<ViewpointExtraction> results(ideas.size());
  if (max_in_flight == 1) {
    for (std::size_t i = 0; i < ideas.size(); ++i) {
      results[i] = extract_viewpoints(*ideas[i], backend, prompt);
    }
    return results;
  }
  for (std::size_t start = 0; start < ideas.size(); start += max_in_flight) {
    const std::size_t stop = std::min(ideas.size(), start + max_in_flight);
    std::vector<std::future<ViewpointExtraction>> window;
    for (std::size_t i = start; i < stop; ++i) {
      window.push_back(std::async(std::launch::async, [&, i] {
        return extract_viewpoints(*ideas[i], backend, prompt);
      }));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = window[i - start].get();
  }
  return results;
}

TokenCost token_cost(const std::vector<TokenUsage>& usages) {
  if (usages.empty()) throw Error("token_cost needs at least one usage record");
  double tokens = 0.0;
  double cost = 0.0;
  for (const auto& u : usages) {
    tokens += static_cast<double>(u.total());
    cost += static_cast<double>(u.total()) * u.price_per_million / 1e6;
  }
  const double n = static_cast<double>(usages.size());
  return {tokens / n, cost / n};
}

ExtractionSummary summarize_extraction(
    const std::vector<std::string>& idea_texts,
    const std::vector<std::vector<std::string>>& viewpoints,
    const std::vector<std::vector<ViewpointPair>>& pairs) {
  ExtractionSummary s;
  s.ideas = viewpoints.size();
  if (s.ideas == 0) return s;
  double idea_words = 0.0;
  for (const auto& t : idea_texts) idea_words += static_cast<double>(count_words(t));
  s.avg_idea_words = idea_texts.empty() ? 0.0 : idea_words / idea_texts.size();

  double total_viewpoints = 0.0;
  double viewpoint_words = 0.0;
  for (const auto& list : viewpoints) {
    total_viewpoints += static_cast<double>(list.size());
    for (const auto& v : list) viewpoint_words += static_cast<double>(count_words(v));
  }
  s.avg_viewpoints = total_viewpoints / static_cast<double>(s.ideas);
  s.avg_viewpoint_words =
      total_viewpoints > 0.0 ? viewpoint_words / total_viewpoints : 0.0;

  if (!pairs.empty()) {
    double total_pairs = 0.0;
    double density = 0.0;
    std::size_t dense_ideas = 0;
    for (std::size_t i = 0; i < pairs.size() && i < viewpoints.size(); ++i) {
      total_pairs += static_cast<double>(pairs[i].size());
      const double n = static_cast<double>(viewpoints[i].size());
      if (n >= 2.0) {
        density += static_cast<double>(pairs[i].size()) / (n * (n - 1.0) / 2.0);
        ++dense_ideas;
      }
    }
    s.avg_pairs = total_pairs / static_cast<double>(pairs.size());
    s.avg_pair_density = dense_ideas ? density / dense_ideas : 0.0;
  }
  return s;
}

}  // namespace viewgraph
