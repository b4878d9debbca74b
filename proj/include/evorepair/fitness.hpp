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

// The two search objectives and the evaluator that obtains them by running
// the subject's tests on a patched scratch copy.

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evorepair/nsga2.hpp"
#include "evorepair/patch.hpp"
#include "evorepair/subject.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

/// f2 assigned to patches whose build fails; larger than any feasible f2
/// (at most 1 + w).
inline constexpr double kInfeasiblePenalty = 10.0;
inline constexpr double kDefaultFitnessWeight = 0.5;

/// z / (1 + z): maps [0, inf) onto [0, 1).
inline double normalize_gap(double z) { return z / (1.0 + z); }

/// Distance between actual and expected for one assertion, in [0, 1].
double assertion_distance(const AssertionRecord& r);

/// Mean assertion distance of one test; 1 for a timeout or crash.
double test_failure_rate(const TestReport& t);

/// mean(h over passing) + w * mean(h over failing); empty means are 0.
double weighted_failure(std::span<const TestReport> executed, double w);

/// Results of the unpatched program on the full suite.
struct Baseline {
  std::vector<TestReport> reports;  // suite order
  std::vector<std::string> failing;  // ids, suite order
  std::vector<std::string> all_ids;
  /// Passing tests covering each statement.
  std::map<StatementLocation, std::vector<std::string>> passing_cover;

  static Baseline from_reports(std::vector<TestReport> reports);
};

struct FitnessContext {
  std::span<const SuspiciousStatement> lbs;
  const SourceSnapshot* snapshot = nullptr;
  const Baseline* baseline = nullptr;
  double w = kDefaultFitnessWeight;
};

/// Evaluates genomes against a subject, one scratch workspace per job.
/// Fitness and plausibility are cached by decoded edit list, so genomes
/// with the same phenotype are run only once.
class SubjectEvaluator : public BatchEvaluator {
 public:
  SubjectEvaluator(FitnessContext ctx, std::vector<std::filesystem::path> workspaces,
                   std::shared_ptr<SubjectRunner> runner);

  std::vector<EvaluationResult> evaluate(std::span<const PatchGenome> genomes) override;

  FitnessVector evaluate(const PatchGenome& g);
  bool is_plausible(const PatchGenome& g);
  /// Full-suite verdict for an explicit edit list.
  bool is_plausible(std::span<const Edit> edits);

  /// Number of fitness evaluations requested (cache hits included).
  std::size_t evaluations() const { return evaluations_; }
  /// Number of distinct patched programs actually run.
  std::size_t subject_runs() const { return subject_runs_; }

  /// Tests run for a patch: originally failing tests plus passing tests
  /// covering an edited statement, in suite order.
  std::vector<std::string> test_selection(std::span<const Edit> edits) const;

 private:
  struct Outcome {
    FitnessVector fitness;
    bool passed_selection = false;
  };

  Outcome run_patch(const std::vector<Edit>& edits, std::size_t slot);
  bool run_full_suite(const std::vector<Edit>& edits, std::size_t slot);
  void prepare(std::size_t slot, const SourceSnapshot& patched);

  FitnessContext ctx_;
  std::vector<std::filesystem::path> workspaces_;
  std::vector<SourceSnapshot> written_;  // what each workspace currently holds
  std::shared_ptr<SubjectRunner> runner_;
  std::mutex mutex_;
  std::unordered_map<std::string, Outcome> fitness_cache_;
  std::unordered_map<std::string, bool> plausible_cache_;
  std::size_t evaluations_ = 0;
  std::atomic<std::size_t> subject_runs_{0};
};

}  // namespace evorepair
