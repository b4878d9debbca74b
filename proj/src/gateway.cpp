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

#include "evorepair/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>

#include "evorepair/error.hpp"
#include "evorepair/subject.hpp"

namespace evorepair {

using nlohmann::json;

void SamplingParams::validate() const {
  if (!(top_p > 0.0 && top_p <= 1.0)) fail(ErrorKind::config, "top_p must lie in (0, 1]");
  if (!(temperature >= 0.0 && temperature <= 1.0)) fail(ErrorKind::config, "temperature must lie in [0, 1]");
  if (top_k < 1 || num_return_sequences < 1 || max_new_tokens < 1)
    fail(ErrorKind::config, "sampling counts must be at least 1");
}

InfillClient::InfillClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)),
      in_flight_(std::make_unique<std::counting_semaphore<64>>(std::clamp(cfg_.max_in_flight, 1, 64))) {
  if (cfg_.base_url.empty()) fail(ErrorKind::config, "endpoint URL is not set");
}

namespace {

bool terminated_reason(const std::string& r) { return r == "stop" || r == "eos" || r == "endofmask"; }

}  // namespace

std::vector<RawSequence> InfillClient::call_once(const PromptBundle& prompt, const SamplingParams& params,
                                                 int n) const {
  json body = {{"prefix", std::string(prompt.prefix())},
               {"suffix", std::string(prompt.suffix())},
               {"top_p", params.top_p},
               {"top_k", params.top_k},
               {"temperature", params.temperature},
               {"n", n},
               {"max_new_tokens", params.max_new_tokens}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* auth = std::getenv(cfg_.auth_env.c_str()); auth && *auth) headers.emplace("Authorization", auth);

  std::string last_error;
  int delay = cfg_.backoff_ms;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
    in_flight_->acquire();
    auto res = client.Post(cfg_.path, headers, payload, "application/json");
    in_flight_->release();
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 413)
      fail(ErrorKind::provider, "endpoint rejected an over-length prompt of " + std::to_string(prompt.token_count) +
                                    " approximate tokens");
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array()) {
      last_error = "malformed endpoint response";
      continue;
    }
    std::vector<RawSequence> out;
    for (const auto& c : reply["choices"]) {
      if (!c.is_object() || !c.contains("text") || !c["text"].is_string()) continue;
      const std::string reason = c.value("finish_reason", std::string());
      out.push_back({c["text"].get<std::string>(), Origin::endpoint, terminated_reason(reason)});
    }
    return out;
  }
  fail(ErrorKind::provider, "infill endpoint " + cfg_.base_url + cfg_.path + " failed after " +
                                std::to_string(cfg_.max_retries) + " retries: " + last_error);
}

std::vector<RawSequence> InfillClient::request_infill(const PromptBundle& prompt, const SamplingParams& params,
                                                      int total) const {
  params.validate();
  if (cfg_.max_prompt_tokens > 0 && prompt.token_count > cfg_.max_prompt_tokens)
    fail(ErrorKind::provider, "prompt has " + std::to_string(prompt.token_count) + " tokens, endpoint limit is " +
                                  std::to_string(cfg_.max_prompt_tokens));
  std::vector<RawSequence> out;
  while (static_cast<int>(out.size()) < total) {
    const int n = std::min(params.num_return_sequences, total - static_cast<int>(out.size()));
    auto batch = call_once(prompt, params, n);
    if (batch.empty()) break;  // endpoint has nothing more to give
    if (static_cast<int>(batch.size()) > n) batch.resize(n);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

namespace {

std::set<std::string> identifiers(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_') {
      cur += ch;
      continue;
    }
    if (!cur.empty()) out.insert(cur);
    cur.clear();
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

std::string statement_text(const std::vector<std::string>& lines, const StatementLocation& loc) {
  std::size_t common = std::string::npos;
  for (int l = loc.line_start; l <= loc.line_end; ++l) {
    const auto& s = lines[l - 1];
    const auto n = s.find_first_not_of(" \t");
    if (n != std::string::npos) common = std::min(common, n);
  }
  if (common == std::string::npos) common = 0;
  std::string out;
  for (int l = loc.line_start; l <= loc.line_end; ++l) {
    const auto& s = lines[l - 1];
    if (l > loc.line_start) out += '\n';
    out += s.size() > common ? s.substr(common) : std::string();
  }
  return out;
}

}  // namespace

std::vector<RawSequence> redundancy_sequences(const SuspiciousStatement& lbs, const SourceSnapshot& snapshot,
                                              std::span<const std::string> comment_prefixes, std::size_t limit) {
  const std::string& text = snapshot.text(lbs.location.file);
  const std::vector<std::string> lines = split_lines(text);
  std::string region;
  const int r_end = std::min<int>(lbs.enclosing_region.end, static_cast<int>(lines.size()));
  for (int l = std::max(1, lbs.enclosing_region.start); l <= r_end; ++l) region += lines[l - 1] + "\n";
  const std::set<std::string> context = identifiers(region);

  struct Scored {
    std::size_t shared;
    std::string text;
  };
  std::vector<Scored> scored;
  for (const StatementLocation& loc : segment_file(lbs.location.file, text, comment_prefixes)) {
    if (loc.overlaps(lbs.location)) continue;
    std::string s = statement_text(lines, loc);
    std::size_t shared = 0;
    for (const auto& id : identifiers(s)) shared += context.count(id);
    scored.push_back({shared, std::move(s)});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.shared > b.shared; });
  std::vector<RawSequence> out;
  for (auto& s : scored) {
    if (out.size() >= limit) break;
    out.push_back({std::move(s.text), Origin::redundancy, true});
  }
  return out;
}

FixtureBook FixtureBook::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::io, "cannot open fixtures file " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::parse, "fixtures file is not valid JSON: " + file.string());
  return from_json(j);
}

FixtureBook FixtureBook::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::parse, "fixtures must map locations to candidate lists");
  FixtureBook book;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const StatementLocation loc = StatementLocation::parse(it.key());
    const json& v = it.value();
    if (!v.is_object()) fail(ErrorKind::parse, "fixture entry " + it.key() + " is not an object");
    Entry e;
    try {
      e.replace = v.value("replace", std::vector<std::string>{});
      e.insert = v.value("insert", std::vector<std::string>{});
    } catch (const json::exception&) {
      fail(ErrorKind::parse, "fixture entry " + it.key() + " must hold string lists");
    }
    book.entries_[loc.key()] = std::move(e);
  }
  return book;
}

std::vector<RawSequence> FixtureBook::sequences(const StatementLocation& loc, PromptMode mode) const {
  auto it = entries_.find(loc.key());
  if (it == entries_.end()) return {};
  const auto& list = mode == PromptMode::replace ? it->second.replace : it->second.insert;
  std::vector<RawSequence> out;
  out.reserve(list.size());
  for (const auto& s : list) out.push_back({s, Origin::fixture, true});
  return out;
}

}  // namespace evorepair
