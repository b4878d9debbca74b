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


#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <unistd.h>
#include <vector>

#include "evorepair/patch.hpp"
#include "evorepair/types.hpp"

namespace testutil {

inline evorepair::SourceSnapshot snap(std::map<std::string, std::string> files) {
  return evorepair::SourceSnapshot(std::move(files));
}

inline evorepair::StatementLocation loc(const std::string& file, int a, int b = -1) {
  return {file, a, b < 0 ? a : b};
}

inline evorepair::TestReport report(const std::string& id, evorepair::Verdict v,
                                    std::vector<evorepair::StatementLocation> covered = {}) {
  evorepair::TestReport r;
  r.test_id = id;
  r.verdict = v;
  r.covered = std::move(covered);
  return r;
}

inline evorepair::AssertionRecord numeric(double expected, double actual, double delta, const std::string& id = "a") {
  evorepair::AssertionRecord a;
  a.assertion_id = id;
  a.kind = evorepair::AssertionKind::numeric;
  a.expected = expected;
  a.actual = actual;
  a.delta = delta;
  a.passed = !(std::abs(actual - expected) >= delta);
  return a;
}

inline evorepair::AssertionRecord categorical(bool passed, const std::string& id = "c") {
  evorepair::AssertionRecord a;
  a.assertion_id = id;
  a.passed = passed;
  return a;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("evorepair-unit-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& p, const std::string& text);
std::string read_file(const std::filesystem::path& p);

/// Source and data directories baked in at configure time.
std::filesystem::path source_dir();
std::filesystem::path data_dir();

}  // namespace testutil
