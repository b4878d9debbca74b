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

// Candidate statements per likely-buggy statement: filtering and splitting
// of raw sequences, deduplication, and merging of spaces from several
// providers.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/gateway.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

using Segmenter = std::function<std::vector<LineRange>(std::string_view)>;
using Validator = std::function<bool(std::string_view)>;

/// Drops unterminated sequences and invalid segments. A sequence with two
/// or more valid segments yields the block of them plus each segment.
std::vector<CandidateStatement> sequences_to_candidates(std::span<const RawSequence> seqs,
                                                        const Segmenter& segment, const Validator& valid);

/// First occurrence per normalized form; with prune_original, forms equal
/// to the original statement are removed too.
std::vector<CandidateStatement> dedupe_and_prune(std::span<const CandidateStatement> cands,
                                                 std::string_view original_text, bool prune_original);

/// a followed by b, deduplicated by normalized form.
std::vector<CandidateStatement> merge_spaces(std::span<const CandidateStatement> a,
                                             std::span<const CandidateStatement> b);

/// Persisted candidate set of one statement:
///   {"location": {...}, "susp": f, "replace": [{"text","origin"}],
///    "insert": [...], "origins": {"fixture": n, ...},
///    "provider_failures": n}
nlohmann::json candidate_set_to_json(const SuspiciousStatement& lbs, int provider_failures);

struct StoredCandidateSet {
  StatementLocation location;
  std::vector<CandidateStatement> replace;
  std::vector<CandidateStatement> insert;
  int provider_failures = 0;
};

StoredCandidateSet candidate_set_from_json(const nlohmann::json& j);

}  // namespace evorepair
