// Copyright 2026 The evorepair Authors
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

// Sources of raw infill sequences: an HTTP infill endpoint, statements
// harvested from the same file, and fixture files.
//
// Endpoint wire format (POST, JSON):
//   request  {"prefix": str, "suffix": str, "top_p": f, "top_k": i,
//             "temperature": f, "n": i, "max_new_tokens": i}
//   response {"choices": [{"text": str, "finish_reason": str}, ...]}
// finish_reason "stop", "eos" or "endofmask" marks a terminated sequence.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "evorepair/patch.hpp"
#include "evorepair/prompt.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

struct SamplingParams {
  double top_p = 0.9;
  int top_k = 50;
  double temperature = 1.0;
  int num_return_sequences = 10;
  int max_new_tokens = 100;

  void validate() const;
};

struct RawSequence {
  std::string text;
  Origin provider = Origin::fixture;
  bool terminated = true;

  bool operator==(const RawSequence&) const = default;
};

struct EndpointConfig {
  std::string base_url;                  // e.g. http://127.0.0.1:8080
  std::string path = "/infill";
  std::string auth_env = "EVOREPAIR_API_KEY";  // value sent as Authorization
  int timeout_ms = 60000;
  int max_retries = 3;
  int backoff_ms = 250;                  // doubles after each failed attempt
  int max_prompt_tokens = 0;             // 0: no client-side limit
  int max_in_flight = 4;
};

/// HTTP infill client. Safe to share between threads; at most
/// max_in_flight requests are outstanding at once.
class InfillClient {
 public:
  explicit InfillClient(EndpointConfig cfg);

  /// Calls the endpoint until `total` sequences have been collected (one
  /// call returns at most num_return_sequences). Throws a provider error
  /// after the retries of one call are exhausted.
  std::vector<RawSequence> request_infill(const PromptBundle& prompt, const SamplingParams& params,
                                          int total) const;

  const EndpointConfig& config() const { return cfg_; }

 private:
  std::vector<RawSequence> call_once(const PromptBundle& prompt, const SamplingParams& params, int n) const;

  EndpointConfig cfg_;
  std::unique_ptr<std::counting_semaphore<64>> in_flight_;
};

/// Other statements of the LBS's file ranked by the number of distinct
/// identifiers they share with the enclosing function; ties keep file
/// order.
std::vector<RawSequence> redundancy_sequences(const SuspiciousStatement& lbs, const SourceSnapshot& snapshot,
                                              std::span<const std::string> comment_prefixes,
                                              std::size_t limit);

/// Fixture file: {"path:start-end": {"replace": [...], "insert": [...]}}.
class FixtureBook {
 public:
  static FixtureBook load(const std::filesystem::path& file);
  static FixtureBook from_json(const nlohmann::json& j);

  std::vector<RawSequence> sequences(const StatementLocation& loc, PromptMode mode) const;

 private:
  struct Entry {
    std::vector<std::string> replace;
    std::vector<std::string> insert;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace evorepair
