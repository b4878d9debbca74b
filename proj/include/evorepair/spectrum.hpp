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

// Spectrum-based fault localization: coverage aggregation, Ochiai
// suspiciousness, and selection of the likely-buggy statement list.

#pragma once

#include <functional>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/patch.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

enum class Outcome : std::uint8_t { pass, fail };

struct TestCoverage {
  std::string test_id;
  Outcome outcome = Outcome::pass;
  std::set<StatementLocation> covered;
};

struct CoverageSpectrum {
  std::vector<TestCoverage> tests;
  std::set<StatementLocation> universe;

  std::size_t failing_count() const;
};

/// Aggregates test reports. Any verdict other than pass counts as a
/// failure. `declared` adds adapter-segmented statements to the universe.
CoverageSpectrum ingest_spectrum(std::span<const TestReport> reports,
                                 std::span<const StatementLocation> declared = {});

/// Same, reading the NDJSON test protocol. Parse errors name the line.
CoverageSpectrum ingest_spectrum(std::istream& ndjson, std::span<const StatementLocation> declared = {});

/// ef / sqrt(total_fail * (ef + ep)); 0 when no failing test covers loc.
double ochiai_score(const CoverageSpectrum& spectrum, const StatementLocation& loc);

/// Finds the surrounding function of a statement, given the file's lines.
using RegionFinder =
    std::function<LineRange(const std::vector<std::string>& lines, const StatementLocation& loc)>;

std::vector<SuspiciousStatement> select_lbs(const CoverageSpectrum& spectrum, double gamma_min, int n_max,
                                            const SourceSnapshot& sources,
                                            const RegionFinder& find_region);

/// JSON array of {file, line_start, line_end, susp} in selection order.
nlohmann::json localization_report(std::span<const SuspiciousStatement> lbs);

}  // namespace evorepair
