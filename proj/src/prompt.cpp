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

#include "evorepair/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "evorepair/error.hpp"
#include "evorepair/patch.hpp"

namespace fs = std::filesystem;

namespace evorepair {

const char* to_string(PromptMode mode) noexcept { return mode == PromptMode::insert ? "insert" : "replace"; }

SymbolCatalog SymbolCatalog::from_json(const nlohmann::json& j) {
  SymbolCatalog c;
  try {
    for (const auto& f : j.value("fields", nlohmann::json::array())) {
      FieldEntry e{f.at("type").get<std::string>(), f.at("name").get<std::string>()};
      if (std::find(c.fields.begin(), c.fields.end(), e) == c.fields.end()) c.fields.push_back(std::move(e));
    }
    for (const auto& m : j.value("methods", nlohmann::json::array())) {
      MethodEntry e{m.at("return_type").get<std::string>(), m.at("name").get<std::string>(),
                    m.value("params", std::vector<std::string>{})};
      if (std::find(c.methods.begin(), c.methods.end(), e) == c.methods.end()) c.methods.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("symbol catalog: ") + e.what());
  }
  return c;
}

SymbolCatalog SymbolCatalog::load_for(const fs::path& dir, const std::string& source_path) {
  const fs::path file = dir / (source_path + ".json");
  if (!fs::exists(file)) return {};
  std::ifstream in(file);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::parse, "symbol catalog is not valid JSON: " + file.string());
  return from_json(j);
}

std::string_view PromptBundle::prefix() const {
  const auto pos = text.find(fill_token);
  return std::string_view(text).substr(0, pos);
}

std::string_view PromptBundle::suffix() const {
  const auto pos = text.find(fill_token);
  return pos == std::string::npos ? std::string_view() : std::string_view(text).substr(pos + fill_token.size());
}

int approx_token_count(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = std::isalnum(c) || c == '_' || c >= 0x80;
    if (word) {
      if (!in_word) ++count;
      in_word = true;
      continue;
    }
    in_word = false;
    if (!std::isspace(c)) ++count;
  }
  return count;
}

TrimResult trim_context(std::span<const std::string> header, std::span<const std::string> body,
                        std::size_t fill_line, int max_tokens) {
  require(fill_line < body.size(), "fill line outside the prompt body");
  TrimResult r;
  for (const auto& h : header) r.token_count += approx_token_count(h);
  r.token_count += approx_token_count(body[fill_line]);
  if (r.token_count > max_tokens)
    fail(ErrorKind::budget, "fill line and header need " + std::to_string(r.token_count) +
                                " tokens, budget is " + std::to_string(max_tokens));

  std::size_t lo = fill_line, hi = fill_line;  // kept window [lo, hi]
  bool before_turn = true;
  while (lo > 0 || hi + 1 < body.size()) {
    const bool take_before = lo > 0 && (before_turn || hi + 1 >= body.size());
    const std::size_t candidate = take_before ? lo - 1 : hi + 1;
    const int cost = approx_token_count(body[candidate]);
    if (r.token_count + cost > max_tokens) break;
    r.token_count += cost;
    if (take_before)
      lo = candidate;
    else
      hi = candidate;
    before_turn = !take_before;
  }
  r.truncated_before = lo > 0;
  r.truncated_after = hi + 1 < body.size();
  r.lines.assign(header.begin(), header.end());
  r.lines.insert(r.lines.end(), body.begin() + lo, body.begin() + hi + 1);
  return r;
}

namespace {

std::string leading_ws(const std::string& line) {
  const auto n = line.find_first_not_of(" \t");
  return n == std::string::npos ? std::string() : line.substr(0, n);
}

}  // namespace

PromptBundle build_prompt(const SuspiciousStatement& lbs, PromptMode mode, const SymbolCatalog& catalog,
                          std::string_view file_text, const PromptOptions& options) {
  require(options.max_tokens >= 64, "max_tokens must be at least 64");
  const std::vector<std::string> lines = split_lines(file_text);
  const LineRange region = lbs.enclosing_region;
  const StatementLocation& loc = lbs.location;
  require(region.start >= 1 && region.end <= static_cast<int>(lines.size()) && region.start <= loc.line_start &&
              loc.line_end <= region.end,
          "enclosing region " + std::to_string(region.start) + "-" + std::to_string(region.end) +
              " does not contain " + loc.key());
  const std::string& token = options.fill_token;
  require(!token.empty(), "fill token must not be empty");

  const std::string& cp = options.comment_prefix;
  std::vector<std::string> header;
  for (const auto& f : catalog.fields) header.push_back(cp + " field: " + f.type_name + " " + f.field_name);
  for (const auto& m : catalog.methods) {
    std::string params;
    for (std::size_t i = 0; i < m.parameter_types.size(); ++i) params += (i ? ", " : "") + m.parameter_types[i];
    header.push_back(cp + " method: " + m.return_type + " " + m.method_name + "(" + params + ")");
  }
  if (mode == PromptMode::replace) header.push_back(cp + " buggy line: " + normalize_statement(lbs.original_text));

  std::vector<std::string> body;
  std::size_t fill_line = 0;
  const std::string indent = leading_ws(lines[loc.line_start - 1]);
  for (int l = region.start; l <= region.end; ++l) {
    if (l == loc.line_start) {
      fill_line = body.size();
      body.push_back(indent + token);
      if (mode == PromptMode::replace) {
        l = loc.line_end;
        continue;
      }
    }
    body.push_back(lines[l - 1]);
  }
  for (const auto& h : header)
    if (h.find(token) != std::string::npos)
      fail(ErrorKind::config, "fill token '" + token + "' occurs in the catalog; choose another token");
  for (std::size_t i = 0; i < body.size(); ++i)
    if (i != fill_line && body[i].find(token) != std::string::npos)
      fail(ErrorKind::config, "fill token '" + token + "' occurs in the source; choose another token");

  TrimResult trimmed = trim_context(header, body, fill_line, options.max_tokens);
  PromptBundle p;
  p.mode = mode;
  p.fill_token = token;
  p.token_count = trimmed.token_count;
  p.truncated_before = trimmed.truncated_before;
  p.truncated_after = trimmed.truncated_after;
  for (const auto& l : trimmed.lines) {
    p.text += l;
    p.text += '\n';
  }
  return p;
}

}  // namespace evorepair
