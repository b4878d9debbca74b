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

#include "evorepair/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>

#include "evorepair/error.hpp"

namespace evorepair {

using nlohmann::json;

namespace {

double number_or_nan(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::protocol, std::string("numeric assertion missing '") + key + "'");
  if (it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!it->is_number()) fail(ErrorKind::protocol, std::string("'") + key + "' is not a number");
  return it->get<double>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

TestReport report_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::protocol, "record is not a JSON object");
  TestReport r;
  auto test = j.find("test");
  if (test == j.end() || !test->is_string() || test->get<std::string>().empty())
    fail(ErrorKind::protocol, "record lacks a 'test' id");
  r.test_id = test->get<std::string>();
  auto verdict = j.find("verdict");
  if (verdict == j.end() || !verdict->is_string()) fail(ErrorKind::protocol, "record lacks a 'verdict'");
  r.verdict = verdict_from_string(verdict->get<std::string>());

  if (auto a = j.find("assertions"); a != j.end()) {
    if (!a->is_array()) fail(ErrorKind::protocol, "'assertions' is not an array");
    for (const json& e : *a) {
      if (!e.is_object()) fail(ErrorKind::protocol, "assertion is not an object");
      AssertionRecord rec;
      rec.assertion_id = e.value("id", std::string());
      const std::string kind = e.value("kind", std::string("categorical"));
      if (kind == "numeric") {
        rec.kind = AssertionKind::numeric;
        rec.expected = number_or_nan(e, "expected");
        rec.actual = number_or_nan(e, "actual");
        rec.delta = e.contains("delta") ? number_or_nan(e, "delta") : 0.0;
      } else if (kind != "categorical") {
        fail(ErrorKind::protocol, "unknown assertion kind '" + kind + "'");
      }
      auto passed = e.find("passed");
      if (passed == e.end() || !passed->is_boolean())
        fail(ErrorKind::protocol, "assertion lacks boolean 'passed'");
      rec.passed = passed->get<bool>();
      r.assertions.push_back(std::move(rec));
    }
  }
  if (auto c = j.find("covered"); c != j.end()) {
    if (!c->is_array()) fail(ErrorKind::protocol, "'covered' is not an array");
    for (const json& e : *c) {
      if (!e.is_string()) fail(ErrorKind::protocol, "covered entry is not a string");
      try {
        r.covered.push_back(StatementLocation::parse(e.get<std::string>()));
      } catch (const Error& err) {
        fail(ErrorKind::protocol, err.what());
      }
    }
    std::sort(r.covered.begin(), r.covered.end());
    r.covered.erase(std::unique(r.covered.begin(), r.covered.end()), r.covered.end());
  }
  if (auto rt = j.find("runtime_ms"); rt != j.end() && rt->is_number()) r.runtime_ms = rt->get<std::int64_t>();
  return r;
}

json report_to_json(const TestReport& r) {
  json j;
  j["test"] = r.test_id;
  j["verdict"] = to_string(r.verdict);
  json assertions = json::array();
  for (const auto& a : r.assertions) {
    json e;
    e["id"] = a.assertion_id;
    if (a.kind == AssertionKind::numeric) {
      e["kind"] = "numeric";
      e["expected"] = number_or_null(a.expected);
      e["actual"] = number_or_null(a.actual);
      e["delta"] = number_or_null(a.delta);
    } else {
      e["kind"] = "categorical";
    }
    e["passed"] = a.passed;
    assertions.push_back(std::move(e));
  }
  j["assertions"] = std::move(assertions);
  json covered = json::array();
  for (const auto& c : r.covered) covered.push_back(c.key());
  j["covered"] = std::move(covered);
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

TestReport parse_report_line(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::protocol, "malformed JSON record: " + std::string(line));
  try {
    return report_from_json(j);
  } catch (const Error& e) {
    fail(ErrorKind::protocol, std::string(e.what()) + ": " + std::string(line));
  }
}

std::string serialize_report(const TestReport& r) { return report_to_json(r).dump(); }

std::vector<TestReport> parse_report_stream(std::istream& in) {
  std::vector<TestReport> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_report_line(line));
    } catch (const Error& e) {
      fail(ErrorKind::parse, "line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace evorepair
