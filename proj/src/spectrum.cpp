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

#include "evorepair/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "evorepair/error.hpp"
#include "evorepair/protocol.hpp"

namespace evorepair {

std::size_t CoverageSpectrum::failing_count() const {
  return static_cast<std::size_t>(std::count_if(
      tests.begin(), tests.end(), [](const TestCoverage& t) { return t.outcome == Outcome::fail; }));
}

CoverageSpectrum ingest_spectrum(std::span<const TestReport> reports,
                                 std::span<const StatementLocation> declared) {
  if (reports.empty()) fail(ErrorKind::domain, "no test reports");
  CoverageSpectrum s;
  std::unordered_set<std::string> seen;
  for (const TestReport& r : reports) {
    if (!seen.insert(r.test_id).second) fail(ErrorKind::domain, "duplicate test id: " + r.test_id);
    TestCoverage t;
    t.test_id = r.test_id;
    t.outcome = r.verdict == Verdict::pass ? Outcome::pass : Outcome::fail;
    t.covered.insert(r.covered.begin(), r.covered.end());
    s.universe.insert(r.covered.begin(), r.covered.end());
    s.tests.push_back(std::move(t));
  }
  s.universe.insert(declared.begin(), declared.end());
  return s;
}

CoverageSpectrum ingest_spectrum(std::istream& ndjson, std::span<const StatementLocation> declared) {
  const std::vector<TestReport> reports = parse_report_stream(ndjson);
  return ingest_spectrum(reports, declared);
}

double ochiai_score(const CoverageSpectrum& spectrum, const StatementLocation& loc) {
  if (!spectrum.universe.count(loc)) fail(ErrorKind::domain, "location outside the universe: " + loc.key());
  std::size_t ef = 0, ep = 0, total_fail = 0;
  for (const TestCoverage& t : spectrum.tests) {
    const bool failed = t.outcome == Outcome::fail;
    total_fail += failed;
    if (t.covered.count(loc)) (failed ? ef : ep) += 1;
  }
  if (ef == 0) return 0.0;
  return static_cast<double>(ef) / std::sqrt(static_cast<double>(total_fail) * static_cast<double>(ef + ep));
}

std::vector<SuspiciousStatement> select_lbs(const CoverageSpectrum& spectrum, double gamma_min, int n_max,
                                            const SourceSnapshot& sources,
                                            const RegionFinder& find_region) {
  require(gamma_min >= 0.0 && gamma_min <= 1.0, "gamma_min must lie in [0, 1]");
  require(n_max >= 1, "n_max must be at least 1");

  std::vector<std::pair<double, const StatementLocation*>> scored;
  for (const StatementLocation& loc : spectrum.universe) {
    const double s = ochiai_score(spectrum, loc);
    if (s >= gamma_min && s > 0.0) scored.emplace_back(s, &loc);
  }
  // The universe is already ordered by (file, line), so a stable sort on
  // score alone yields the path/line tie-break.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > static_cast<std::size_t>(n_max)) scored.resize(n_max);

  std::vector<SuspiciousStatement> out;
  out.reserve(scored.size());
  for (const auto& [score, loc] : scored) {
    const std::vector<std::string> lines = split_lines(sources.text(loc->file));
    if (loc->line_end > static_cast<int>(lines.size()))
      fail(ErrorKind::io, "location " + loc->key() + " lies beyond the end of " + loc->file);
    SuspiciousStatement s;
    s.location = *loc;
    s.susp = score;
    for (int l = loc->line_start; l <= loc->line_end; ++l) {
      if (l > loc->line_start) s.original_text += '\n';
      s.original_text += lines[l - 1];
    }
    s.enclosing_region = find_region ? find_region(lines, *loc)
                                     : LineRange{1, static_cast<int>(lines.size())};
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json localization_report(std::span<const SuspiciousStatement> lbs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : lbs)
    arr.push_back({{"file", s.location.file},
                   {"line_start", s.location.line_start},
                   {"line_end", s.location.line_end},
                   {"susp", s.susp}});
  return arr;
}

}  // namespace evorepair
