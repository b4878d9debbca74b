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

#include "evorepair/types.hpp"

#include <cctype>
#include <charconv>

#include "evorepair/error.hpp"

namespace evorepair {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::contract: return "contract violation";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::protocol: return "protocol error";
    case ErrorKind::provider: return "provider error";
    case ErrorKind::evaluation: return "evaluation error";
    case ErrorKind::budget: return "token budget error";
  }
  return "error";
}

std::string StatementLocation::key() const {
  return file + ":" + std::to_string(line_start) + "-" + std::to_string(line_end);
}

namespace {

int parse_line_number(std::string_view s, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1)
    fail(ErrorKind::parse, "bad statement location '" + std::string(whole) + "'");
  return value;
}

}  // namespace

StatementLocation StatementLocation::parse(std::string_view key) {
  const auto colon = key.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    fail(ErrorKind::parse, "bad statement location '" + std::string(key) + "'");
  std::string_view span = key.substr(colon + 1);
  StatementLocation loc;
  loc.file = std::string(key.substr(0, colon));
  const auto dash = span.find('-');
  if (dash == std::string_view::npos) {
    loc.line_start = loc.line_end = parse_line_number(span, key);
  } else {
    loc.line_start = parse_line_number(span.substr(0, dash), key);
    loc.line_end = parse_line_number(span.substr(dash + 1), key);
  }
  if (loc.line_start > loc.line_end)
    fail(ErrorKind::parse, "statement location has start after end: '" + std::string(key) + "'");
  return loc;
}

const char* to_string(Origin origin) noexcept {
  switch (origin) {
    case Origin::endpoint: return "endpoint";
    case Origin::redundancy: return "redundancy";
    case Origin::fixture: return "fixture";
    case Origin::split_from_block: return "split_from_block";
  }
  return "fixture";
}

Origin origin_from_string(std::string_view name) {
  if (name == "endpoint") return Origin::endpoint;
  if (name == "redundancy") return Origin::redundancy;
  if (name == "fixture") return Origin::fixture;
  if (name == "split_from_block") return Origin::split_from_block;
  fail(ErrorKind::parse, "unknown candidate origin '" + std::string(name) + "'");
}

std::string normalize_statement(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::timeout: return "timeout";
    case Verdict::crash: return "crash";
  }
  return "fail";
}

Verdict verdict_from_string(std::string_view name) {
  if (name == "pass") return Verdict::pass;
  if (name == "fail") return Verdict::fail;
  if (name == "timeout") return Verdict::timeout;
  if (name == "crash") return Verdict::crash;
  fail(ErrorKind::protocol, "unknown verdict '" + std::string(name) + "'");
}

}  // namespace evorepair
