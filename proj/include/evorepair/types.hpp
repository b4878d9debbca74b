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

// Domain types shared by the localization, patching, fitness and search
// layers.

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evorepair {

/// Inclusive 1-based line span.
struct LineRange {
  int start = 1;
  int end = 1;

  auto operator<=>(const LineRange&) const = default;
  bool contains(int line) const { return line >= start && line <= end; }
  bool overlaps(const LineRange& o) const {
    return start <= o.end && o.start <= end;
  }
};

/// A statement position inside one subject file. Ordering is by file path,
/// then start line, then end line; the tie-break rule for equal
/// suspiciousness relies on it.
struct StatementLocation {
  std::string file;
  int line_start = 1;
  int line_end = 1;

  auto operator<=>(const StatementLocation&) const = default;

  LineRange lines() const { return {line_start, line_end}; }
  bool overlaps(const StatementLocation& o) const {
    return file == o.file && lines().overlaps(o.lines());
  }

  /// "path:start-end", the form used on the wire and in fixture files.
  std::string key() const;
  static StatementLocation parse(std::string_view key);
};

enum class Origin : std::uint8_t { endpoint, redundancy, fixture, split_from_block };

const char* to_string(Origin origin) noexcept;
Origin origin_from_string(std::string_view name);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_statement(std::string_view text);

struct CandidateStatement {
  std::string text;
  Origin origin = Origin::fixture;
  std::string normalized;

  CandidateStatement() = default;
  CandidateStatement(std::string t, Origin o)
      : text(std::move(t)), origin(o), normalized(normalize_statement(text)) {}

  bool operator==(const CandidateStatement&) const = default;
};

/// A likely-buggy statement together with its two candidate sets.
struct SuspiciousStatement {
  StatementLocation location;
  double susp = 0.0;
  std::string original_text;
  LineRange enclosing_region;
  std::vector<CandidateStatement> replacement_candidates;
  std::vector<CandidateStatement> insertion_candidates;
};

enum class Verdict : std::uint8_t { pass, fail, timeout, crash };

const char* to_string(Verdict verdict) noexcept;
Verdict verdict_from_string(std::string_view name);

enum class AssertionKind : std::uint8_t { numeric, categorical };

struct AssertionRecord {
  std::string assertion_id;
  AssertionKind kind = AssertionKind::categorical;
  double expected = 0.0;
  double actual = 0.0;
  double delta = 0.0;
  bool passed = false;

  bool operator==(const AssertionRecord&) const = default;
};

struct TestReport {
  std::string test_id;
  Verdict verdict = Verdict::fail;
  std::vector<AssertionRecord> assertions;
  std::vector<StatementLocation> covered;  // sorted, unique
  std::int64_t runtime_ms = 0;

  bool operator==(const TestReport&) const = default;
};

/// The two minimized objectives: applied edit count and weighted failure
/// rate.
struct FitnessVector {
  double f1 = 0.0;
  double f2 = 0.0;

  bool operator==(const FitnessVector&) const = default;
};

}  // namespace evorepair
