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

#include "evorepair/candidates.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "evorepair/error.hpp"
#include "evorepair/patch.hpp"

namespace evorepair {

using nlohmann::json;

namespace {

/// Lines of [first, last] with their common indentation removed.
std::string dedented(const std::vector<std::string>& lines, int first, int last) {
  std::size_t common = std::string::npos;
  for (int l = first; l <= last; ++l) {
    const auto n = lines[l - 1].find_first_not_of(" \t");
    if (n != std::string::npos) common = std::min(common, n);
  }
  if (common == std::string::npos) common = 0;
  std::string out;
  for (int l = first; l <= last; ++l) {
    if (!out.empty()) out += '\n';
    const auto& s = lines[l - 1];
    out += s.size() > common ? s.substr(common) : std::string();
  }
  return out;
}

std::string join_blocks(const std::vector<std::string>& parts) {
  // Keep relative indentation of the parts as they stood in the sequence.
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '\n';
    out += p;
  }
  return out;
}

}  // namespace

std::vector<CandidateStatement> sequences_to_candidates(std::span<const RawSequence> seqs,
                                                        const Segmenter& segment, const Validator& valid) {
  std::vector<CandidateStatement> out;
  for (const RawSequence& seq : seqs) {
    if (!seq.terminated) continue;
    const std::vector<std::string> lines = split_lines(seq.text);
    std::vector<LineRange> ranges;
    for (const LineRange& r : segment(seq.text))
      if (valid(dedented(lines, r.start, r.end))) ranges.push_back(r);
    if (ranges.empty()) continue;
    if (ranges.size() == 1) {
      out.emplace_back(dedented(lines, ranges[0].start, ranges[0].end), seq.provider);
      continue;
    }
    // The block keeps the segments' relative indentation.
    std::size_t common = std::string::npos;
    for (const auto& r : ranges)
      for (int l = r.start; l <= r.end; ++l) {
        const auto n = lines[l - 1].find_first_not_of(" \t");
        if (n != std::string::npos) common = std::min(common, n);
      }
    std::vector<std::string> block_lines;
    for (const auto& r : ranges)
      for (int l = r.start; l <= r.end; ++l) {
        const auto& s = lines[l - 1];
        block_lines.push_back(s.size() > common ? s.substr(common) : std::string());
      }
    out.emplace_back(join_blocks(block_lines), seq.provider);
    for (const auto& r : ranges) out.emplace_back(dedented(lines, r.start, r.end), Origin::split_from_block);
  }
  return out;
}

std::vector<CandidateStatement> dedupe_and_prune(std::span<const CandidateStatement> cands,
                                                 std::string_view original_text, bool prune_original) {
  const std::string original = normalize_statement(original_text);
  std::unordered_set<std::string> seen;
  std::vector<CandidateStatement> out;
  for (const CandidateStatement& c : cands) {
    if (c.normalized.empty()) continue;
    if (prune_original && c.normalized == original) continue;
    if (!seen.insert(c.normalized).second) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<CandidateStatement> merge_spaces(std::span<const CandidateStatement> a,
                                             std::span<const CandidateStatement> b) {
  std::vector<CandidateStatement> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return dedupe_and_prune(all, {}, false);
}

namespace {

json candidates_json(const std::vector<CandidateStatement>& list, std::map<std::string, int>& origins) {
  json arr = json::array();
  for (const auto& c : list) {
    arr.push_back({{"text", c.text}, {"origin", to_string(c.origin)}});
    ++origins[to_string(c.origin)];
  }
  return arr;
}

std::vector<CandidateStatement> candidates_from(const json& arr) {
  std::vector<CandidateStatement> out;
  for (const auto& e : arr)
    out.emplace_back(e.at("text").get<std::string>(), origin_from_string(e.at("origin").get<std::string>()));
  return out;
}

}  // namespace

json candidate_set_to_json(const SuspiciousStatement& lbs, int provider_failures) {
  std::map<std::string, int> origins;
  json j;
  j["location"] = {{"file", lbs.location.file},
                   {"line_start", lbs.location.line_start},
                   {"line_end", lbs.location.line_end}};
  j["susp"] = lbs.susp;
  j["original"] = lbs.original_text;
  j["replace"] = candidates_json(lbs.replacement_candidates, origins);
  j["insert"] = candidates_json(lbs.insertion_candidates, origins);
  j["origins"] = origins;
  j["provider_failures"] = provider_failures;
  return j;
}

StoredCandidateSet candidate_set_from_json(const json& j) {
  StoredCandidateSet s;
  try {
    const json& loc = j.at("location");
    s.location = {loc.at("file").get<std::string>(), loc.at("line_start").get<int>(), loc.at("line_end").get<int>()};
    s.replace = candidates_from(j.at("replace"));
    s.insert = candidates_from(j.at("insert"));
    s.provider_failures = j.value("provider_failures", 0);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("candidate set: ") + e.what());
  }
  return s;
}

}  // namespace evorepair
