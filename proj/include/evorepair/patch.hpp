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

// Patch genomes, their phenotype (line edits), snapshot application and
// unified diffs.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evorepair/types.hpp"

namespace evorepair {

/// Operation selector of one genome position. The numeric values are the
/// 1/2/3 encoding of the operation gene.
enum class EditKind : std::uint8_t { remove = 1, replace = 2, insert_before = 3 };

const char* to_string(EditKind kind) noexcept;

/// Four parallel vectors, one entry per likely-buggy statement:
///   enabled[j]       modify statement j at all
///   operation[j]     which edit to apply when enabled
///   replace_pick[j]  0-based index into the replacement candidates
///   insert_pick[j]   0-based index into the insertion candidates
struct PatchGenome {
  std::vector<std::uint8_t> enabled;
  std::vector<EditKind> operation;
  std::vector<std::uint32_t> replace_pick;
  std::vector<std::uint32_t> insert_pick;

  PatchGenome() = default;
  explicit PatchGenome(std::size_t n)
      : enabled(n, 0), operation(n, EditKind::remove), replace_pick(n, 0), insert_pick(n, 0) {}

  std::size_t size() const { return enabled.size(); }
  bool consistent() const {
    return operation.size() == size() && replace_pick.size() == size() &&
           insert_pick.size() == size();
  }
  /// Whether position j holds the same four genes in both genomes.
  bool same_at(const PatchGenome& other, std::size_t j) const {
    return enabled[j] == other.enabled[j] && operation[j] == other.operation[j] &&
           replace_pick[j] == other.replace_pick[j] && insert_pick[j] == other.insert_pick[j];
  }
  void swap_at(PatchGenome& other, std::size_t j);

  bool operator==(const PatchGenome&) const = default;
};

/// Checks length and index-range invariants against the candidate sets.
bool genome_fits(const PatchGenome& g, std::span<const SuspiciousStatement> lbs);

struct Edit {
  StatementLocation location;
  EditKind kind = EditKind::remove;
  std::string text;

  bool operator==(const Edit&) const = default;
};

std::vector<Edit> decode_genome(const PatchGenome& g, std::span<const SuspiciousStatement> lbs);

/// Stable identity of an edit list, independent of input order.
std::string edit_key(std::span<const Edit> edits);

/// Immutable map from relative path to file text.
class SourceSnapshot {
 public:
  SourceSnapshot() : fingerprint_(compute_fingerprint({})) {}
  explicit SourceSnapshot(std::map<std::string, std::string> files)
      : files_(std::move(files)), fingerprint_(compute_fingerprint(files_)) {}

  const std::map<std::string, std::string>& files() const { return files_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  bool contains(const std::string& path) const { return files_.count(path) != 0; }
  /// Throws an io error naming the file when absent.
  const std::string& text(const std::string& path) const;

  bool operator==(const SourceSnapshot& o) const { return files_ == o.files_; }

 private:
  static std::uint64_t compute_fingerprint(const std::map<std::string, std::string>& files);

  std::map<std::string, std::string> files_;
  std::uint64_t fingerprint_;
};

/// Splits into lines without terminators; a trailing newline does not
/// produce an empty final line.
std::vector<std::string> split_lines(std::string_view text);

/// Applies line edits, per file in descending start-line order. Inserted
/// and replacing text is re-indented to the first line of the target
/// statement.
SourceSnapshot apply_edits(const SourceSnapshot& snapshot, std::span<const Edit> edits);

/// Unified diff with three context lines, one section per changed file in
/// path order. Empty when the snapshots are identical.
std::string render_diff(const SourceSnapshot& before, const SourceSnapshot& after);

/// Applies a unified diff produced by render_diff (or any strict unified
/// diff). Context mismatches are parse errors naming file and hunk.
SourceSnapshot apply_unified_diff(const SourceSnapshot& snapshot, std::string_view diff);

}  // namespace evorepair
