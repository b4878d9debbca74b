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

// Pipeline stages over one subject: localize, prompts, candidates, repair,
// validate, plus the corpus benchmark. Every stage writes its artifacts
// under <out>/<subject id>/.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/fitness.hpp"
#include "evorepair/gateway.hpp"
#include "evorepair/nsga2.hpp"
#include "evorepair/patch.hpp"
#include "evorepair/subject.hpp"

namespace evorepair {

enum class ProviderKind : std::uint8_t { automatic, endpoint, redundancy, fixture, merge };
const char* to_string(ProviderKind kind) noexcept;
ProviderKind provider_from_string(std::string_view name);

/// Run options. Keys of the JSON form match the field names below, except
/// "candidates" (candidates_dir) and "out" (out_dir).
struct RunOptions {
  double gamma_min = 0.1;
  int n_max = 60;
  int pop = 40;
  int gens = 50;
  double w = 0.5;
  double mu = 0.06;
  std::uint64_t seed = 42;
  int jobs = 1;
  int max_tokens = 1536;
  ProviderKind provider = ProviderKind::automatic;
  std::string endpoint_url;
  StopMode stop_mode = StopMode::full_budget;
  double time_limit = 3600.0;  // seconds per subject
  std::optional<std::filesystem::path> candidates_dir;
  std::filesystem::path out_dir = "out";
  int sequences_per_mode = 50;
  int redundancy_limit = 50;
  SamplingParams sampling;

  /// Overwrites the fields present in `j`; unknown keys are config errors.
  void apply(const nlohmann::json& j);
  void validate() const;
  /// Built-in defaults, then the subject's "options", then `flags`.
  static RunOptions resolve(const SubjectConfig& subject, const nlohmann::json& flags);
  /// Search-relevant settings, as echoed in the repair report. Paths and
  /// the job count are left out so reports compare across machines.
  nlohmann::json echo() const;
};

struct BenchRow {
  std::string subject;
  bool solved = false;
  std::optional<std::size_t> cost;  // evaluations to the first plausible patch
  std::size_t evaluations = 0;
  std::size_t archive_size = 0;
  int min_edits = 0;  // edits of the smallest archived patch
  std::int64_t wall_ms = 0;
  std::string error;
};

class RepairSession {
 public:
  RepairSession(SubjectConfig subject, RunOptions options);
  ~RepairSession();
  RepairSession(const RepairSession&) = delete;
  RepairSession& operator=(const RepairSession&) = delete;

  const SubjectConfig& subject() const { return subject_; }
  const RunOptions& options() const { return options_; }
  std::filesystem::path output_dir() const;

  /// Runs the pristine suite, ranks statements, writes localization.json.
  const std::vector<SuspiciousStatement>& localize();
  /// prompts/lbs_NNN_{replace,insert}.txt plus prompts/index.json.
  std::size_t write_prompts();
  /// Fills the candidate sets from the configured provider and writes
  /// candidates/lbs_NNN.json. Returns the total number of candidates.
  std::size_t build_candidates();
  /// Loads candidate sets from `dir` instead of generating them.
  std::size_t load_candidates(const std::filesystem::path& dir);
  /// Search, archive revalidation, report.json, timing.json and
  /// patches/patch_NN.diff. Returns the report.
  nlohmann::json repair();
  /// Full-suite verdict of the pristine subject with `diff` applied.
  bool validate(const std::filesystem::path& diff);

  const std::vector<SuspiciousStatement>& lbs() const { return lbs_; }
  const Baseline& baseline() const { return baseline_; }
  const SourceSnapshot& snapshot() const { return snapshot_; }
  int provider_failures() const { return provider_failures_; }

 private:
  std::filesystem::path workspace(std::size_t slot);
  bool run_suite_on(const SourceSnapshot& snap);
  void ensure_localized();

  SubjectConfig subject_;
  RunOptions options_;
  SourceSnapshot snapshot_;
  std::shared_ptr<SubjectRunner> runner_;
  std::filesystem::path scratch_;
  std::vector<std::filesystem::path> workspaces_;
  std::optional<std::filesystem::path> validate_space_;
  Baseline baseline_;
  std::vector<SuspiciousStatement> lbs_;
  bool localized_ = false;
  bool have_candidates_ = false;
  int provider_failures_ = 0;
};

/// Maps covered ranges reported by a test shim onto segmented statements
/// (every statement overlapping a reported range counts as covered).
std::vector<TestReport> map_coverage(std::vector<TestReport> reports,
                                     const std::vector<StatementLocation>& statements);

/// Runs localize, candidates and repair on every subject directory below
/// `corpus` (sorted by name) and writes bench.json and bench.csv to
/// `flags.out`. A failing subject is recorded and the run continues.
nlohmann::json run_bench(const std::filesystem::path& corpus, const nlohmann::json& flags);

}  // namespace evorepair
