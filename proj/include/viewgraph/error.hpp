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
#include <stdexcept>
#include <string>

namespace viewgraph {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A corpus or JSON-lines record that failed to parse or validate.
class RecordError : public Error {
 public:
  RecordError(std::size_t line, std::string raw, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what),
        line_(line),
        raw_(std::move(raw)) {}

  std::size_t line() const { return line_; }
  const std::string& raw() const { return raw_; }

 private:
  std::size_t line_;
  std::string raw_;
};

// An LLM completion that does not follow the expected bracket grammar.
class ResponseParseError : public Error {
 public:
  ResponseParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}

  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// A remote call that kept failing after all retries.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

}  // namespace viewgraph
