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

// Context-aware infill prompts for one likely-buggy statement.
//
// Layout, top to bottom:
//   // field: <type> <name>                       (one per catalog field)
//   // method: <ret> <name>(<param, param>)        (one per catalog method)
//   // buggy line: <original statement>            (replace mode only)
//   <enclosing function, with the statement replaced by the fill token
//    (replace mode) or the fill token on its own line above it (insert)>
//
// The function body is trimmed around the fill line to fit the token
// budget; the header lines always count first.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/types.hpp"

namespace evorepair {

enum class PromptMode : std::uint8_t { replace, insert };

const char* to_string(PromptMode mode) noexcept;

struct FieldEntry {
  std::string type_name;
  std::string field_name;
  bool operator==(const FieldEntry&) const = default;
};

struct MethodEntry {
  std::string return_type;
  std::string method_name;
  std::vector<std::string> parameter_types;
  bool operator==(const MethodEntry&) const = default;
};

struct SymbolCatalog {
  std::vector<FieldEntry> fields;
  std::vector<MethodEntry> methods;

  bool empty() const { return fields.empty() && methods.empty(); }

  /// {"fields":[{"type","name"}], "methods":[{"return_type","name","params"}]}
  /// Duplicate entries are dropped, first occurrence wins.
  static SymbolCatalog from_json(const nlohmann::json& j);
  /// `dir/<source path>.json`; an absent file is an empty catalog.
  static SymbolCatalog load_for(const std::filesystem::path& dir, const std::string& source_path);
};

struct PromptOptions {
  int max_tokens = 1536;
  std::string fill_token = "<FILL_ME>";
  std::string comment_prefix = "//";
};

struct PromptBundle {
  PromptMode mode = PromptMode::replace;
  std::string text;
  std::string fill_token;
  int token_count = 0;
  bool truncated_before = false;
  bool truncated_after = false;

  std::string_view prefix() const;
  std::string_view suffix() const;
};

/// Word-character runs plus each non-space punctuation character.
int approx_token_count(std::string_view text);

struct TrimResult {
  std::vector<std::string> lines;  // header followed by the kept body lines
  int token_count = 0;
  bool truncated_before = false;
  bool truncated_after = false;
};

/// Keeps the header and the fill line, then grows the window one line
/// before, one line after, alternately, stopping at the first line that
/// would exceed max_tokens. Throws a budget error when the header and fill
/// line alone do not fit.
TrimResult trim_context(std::span<const std::string> header, std::span<const std::string> body,
                        std::size_t fill_line, int max_tokens);

PromptBundle build_prompt(const SuspiciousStatement& lbs, PromptMode mode, const SymbolCatalog& catalog,
                          std::string_view file_text, const PromptOptions& options = {});

}  // namespace evorepair
