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

// Test-report wire protocol: one JSON object per line on the test
// process's stdout, one object per test.
//
//   {"test":"t1","verdict":"fail",
//    "assertions":[{"id":"a1","kind":"numeric","expected":1.0,
//                   "actual":1.5,"delta":0.1,"passed":false}],
//    "covered":["m.src:3-3"],"runtime_ms":4}
//
// "runtime_ms" is optional. Categorical assertions carry only "id",
// "kind":"categorical" and "passed". A numeric "actual" of null (NaN or
// infinity on the subject side) is read as NaN.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/types.hpp"

namespace evorepair {

TestReport report_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const TestReport& r);

/// Parses one protocol line. Errors are protocol errors quoting the line.
TestReport parse_report_line(std::string_view line);

/// Single-line serialization (no trailing newline).
std::string serialize_report(const TestReport& r);

/// Parses a whole stream; blank lines are skipped, errors carry the 1-based
/// line number.
std::vector<TestReport> parse_report_stream(std::istream& in);

}  // namespace evorepair
