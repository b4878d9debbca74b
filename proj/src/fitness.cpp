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

#include "evorepair/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "evorepair/error.hpp"

namespace fs = std::filesystem;

namespace evorepair {

double assertion_distance(const AssertionRecord& r) {
  if (r.kind == AssertionKind::categorical) return r.passed ? 0.0 : 1.0;
  require(!(r.delta < 0.0), "assertion " + r.assertion_id + " has a negative delta");
  const double gap = std::fabs(r.actual - r.expected);
  if (std::isnan(gap)) return 1.0;
  const double tol = std::isnan(r.delta) ? 0.0 : r.delta;
  if (gap < tol) return 0.0;
  if (std::isinf(gap)) return 1.0;
  return normalize_gap(gap - tol);
}

double test_failure_rate(const TestReport& t) {
  if (t.verdict == Verdict::timeout || t.verdict == Verdict::crash) return 1.0;
  if (t.assertions.empty()) return t.verdict == Verdict::pass ? 0.0 : 1.0;
  double sum = 0.0;
  for (const auto& a : t.assertions) sum += assertion_distance(a);
  return sum / static_cast<double>(t.assertions.size());
}

double weighted_failure(std::span<const TestReport> executed, double w) {
  double pos = 0.0, neg = 0.0;
  std::size_t npos = 0, nneg = 0;
  for (const TestReport& t : executed) {
    if (t.verdict == Verdict::pass) {
      pos += test_failure_rate(t);
      ++npos;
    } else {
      neg += test_failure_rate(t);
      ++nneg;
    }
  }
  const double mean_pos = npos ? pos / static_cast<double>(npos) : 0.0;
  const double mean_neg = nneg ? neg / static_cast<double>(nneg) : 0.0;
  return mean_pos + w * mean_neg;
}

Baseline Baseline::from_reports(std::vector<TestReport> reports) {
  Baseline b;
  for (const TestReport& r : reports) {
    b.all_ids.push_back(r.test_id);
    if (r.verdict != Verdict::pass) {
      b.failing.push_back(r.test_id);
      continue;
    }
    for (const auto& loc : r.covered) b.passing_cover[loc].push_back(r.test_id);
  }
  b.reports = std::move(reports);
  return b;
}

SubjectEvaluator::SubjectEvaluator(FitnessContext ctx, std::vector<fs::path> workspaces,
                                   std::shared_ptr<SubjectRunner> runner)
    : ctx_(ctx), workspaces_(std::move(workspaces)), runner_(std::move(runner)) {
  require(ctx_.snapshot && ctx_.baseline, "fitness context lacks its snapshot or baseline");
  require(!workspaces_.empty(), "evaluator needs at least one workspace");
  written_.assign(workspaces_.size(), *ctx_.snapshot);
}

std::vector<std::string> SubjectEvaluator::test_selection(std::span<const Edit> edits) const {
  std::set<std::string> chosen(ctx_.baseline->failing.begin(), ctx_.baseline->failing.end());
  for (const Edit& e : edits) {
    for (const auto& [loc, ids] : ctx_.baseline->passing_cover)
      if (loc.overlaps(e.location)) chosen.insert(ids.begin(), ids.end());
  }
  std::vector<std::string> ordered;
  for (const auto& id : ctx_.baseline->all_ids)
    if (chosen.count(id)) ordered.push_back(id);
  return ordered;
}

void SubjectEvaluator::prepare(std::size_t slot, const SourceSnapshot& patched) {
  SourceSnapshot& current = written_[slot];
  if (current.fingerprint() == patched.fingerprint() && current == patched) return;
  std::map<std::string, std::string> changed;
  for (const auto& [path, text] : patched.files()) {
    auto it = current.files().find(path);
    if (it == current.files().end() || it->second != text) changed.emplace(path, text);
  }
  materialize(SourceSnapshot(std::move(changed)), workspaces_[slot]);
  current = patched;
}

SubjectEvaluator::Outcome SubjectEvaluator::run_patch(const std::vector<Edit>& edits, std::size_t slot) {
  Outcome out;
  out.fitness.f1 = static_cast<double>(edits.size());
  prepare(slot, apply_edits(*ctx_.snapshot, edits));
  ++subject_runs_;
  if (!runner_->build(workspaces_[slot])) {
    out.fitness.f2 = kInfeasiblePenalty;
    return out;
  }
  const std::vector<std::string> selection = test_selection(edits);
  std::vector<TestReport> reports;
  try {
    reports = runner_->run_tests(workspaces_[slot], TestSelection::of(selection));
  } catch (const Error& e) {
    // A patched program that corrupts the report channel counts as a crash
    // of every selected test; the same failure on the pristine program is
    // caught when the baseline is taken.
    if (e.kind() != ErrorKind::protocol) throw;
    reports.clear();
    for (const auto& id : selection) reports.push_back({id, Verdict::crash, {}, {}, 0});
  }
  out.fitness.f2 = weighted_failure(reports, ctx_.w);
  out.passed_selection =
      reports.size() == selection.size() &&
      std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.verdict == Verdict::pass; });
  return out;
}

bool SubjectEvaluator::run_full_suite(const std::vector<Edit>& edits, std::size_t slot) {
  prepare(slot, apply_edits(*ctx_.snapshot, edits));
  if (!runner_->build(workspaces_[slot])) return false;
  std::vector<TestReport> reports;
  try {
    reports = runner_->run_tests(workspaces_[slot], TestSelection::of(ctx_.baseline->all_ids));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::protocol) throw;
    return false;
  }
  return reports.size() == ctx_.baseline->all_ids.size() &&
         std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.verdict == Verdict::pass; });
}

std::vector<EvaluationResult> SubjectEvaluator::evaluate(std::span<const PatchGenome> genomes) {
  std::vector<std::vector<Edit>> decoded;
  std::vector<std::string> keys;
  decoded.reserve(genomes.size());
  for (const PatchGenome& g : genomes) {
    decoded.push_back(decode_genome(g, ctx_.lbs));
    keys.push_back(edit_key(decoded.back()));
  }

  // Distinct uncached phenotypes, in first-occurrence order.
  std::vector<std::size_t> todo;
  {
    std::set<std::string> queued;
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (!fitness_cache_.count(keys[i]) && queued.insert(keys[i]).second) todo.push_back(i);
  }

  std::vector<Outcome> outcomes(todo.size());
  std::vector<int> plausible(todo.size(), -1);
  std::vector<std::exception_ptr> errors(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&](std::size_t slot) {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      try {
        const auto& edits = decoded[todo[k]];
        outcomes[k] = run_patch(edits, slot);
        if (outcomes[k].passed_selection) {
          bool cached = false;
          {
            std::lock_guard lock(mutex_);
            auto it = plausible_cache_.find(keys[todo[k]]);
            if (it != plausible_cache_.end()) {
              plausible[k] = it->second;
              cached = true;
            }
          }
          if (!cached) plausible[k] = run_full_suite(edits, slot) ? 1 : 0;
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::min(workspaces_.size(), todo.size());
  if (jobs <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t s = 0; s < jobs; ++s) threads.emplace_back(work, s);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < todo.size(); ++k) {
    fitness_cache_.emplace(keys[todo[k]], outcomes[k]);
    if (plausible[k] >= 0) plausible_cache_.emplace(keys[todo[k]], plausible[k] == 1);
  }
  std::vector<EvaluationResult> results;
  results.reserve(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    ++evaluations_;
    const Outcome& o = fitness_cache_.at(keys[i]);
    bool is_plausible = false;
    if (o.passed_selection) {
      auto it = plausible_cache_.find(keys[i]);
      is_plausible = it != plausible_cache_.end() && it->second;
    }
    results.push_back({o.fitness, is_plausible, keys[i]});
  }
  return results;
}

FitnessVector SubjectEvaluator::evaluate(const PatchGenome& g) {
  return evaluate(std::span<const PatchGenome>(&g, 1)).front().fitness;
}

bool SubjectEvaluator::is_plausible(std::span<const Edit> edits) {
  const std::vector<Edit> list(edits.begin(), edits.end());
  const std::string key = edit_key(list);
  {
    std::lock_guard lock(mutex_);
    auto it = plausible_cache_.find(key);
    if (it != plausible_cache_.end()) return it->second;
  }
  const bool ok = run_full_suite(list, 0);
  std::lock_guard lock(mutex_);
  plausible_cache_.emplace(key, ok);
  return ok;
}

bool SubjectEvaluator::is_plausible(const PatchGenome& g) {
  const std::vector<Edit> edits = decode_genome(g, ctx_.lbs);
  return is_plausible(std::span<const Edit>(edits));
}

}  // namespace evorepair
