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


#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "evorepair/error.hpp"
#include "evorepair/fitness.hpp"
#include "helpers.hpp"

using namespace evorepair;
using testutil::categorical;
using testutil::loc;
using testutil::numeric;
using testutil::snap;

namespace {

TestReport with(const std::string& id, Verdict v, std::vector<AssertionRecord> as) {
  TestReport t;
  t.test_id = id;
  t.verdict = v;
  t.assertions = std::move(as);
  return t;
}

// A three-line program. t_fix checks line 2 against "good" (numeric
// distance = number of differing characters); t_one and t_three pass
// and cover lines 1 and 3. A file containing "nobuild" fails to build.
class FakeRunner : public SubjectRunner {
 public:
  bool build(const std::filesystem::path& dir) override {
    ++builds;
    return testutil::read_file(dir / "m.src").find("nobuild") == std::string::npos;
  }

  std::vector<TestReport> run_tests(const std::filesystem::path& dir, const TestSelection& sel) override {
    ++runs;
    if (throw_io) fail(ErrorKind::io, "disk on fire");
    if (throw_protocol) fail(ErrorKind::protocol, "garbage on stdout");
    const auto lines = split_lines(testutil::read_file(dir / "m.src"));
    std::vector<TestReport> out;
    const std::vector<std::string> ids = sel.all ? std::vector<std::string>{"t_one", "t_fix", "t_three"} : sel.ids;
    last_selection = ids;
    for (const auto& id : ids) {
      if (id == "t_fix") {
        const std::string got = lines.size() > 1 ? lines[1] : "";
        double gap = std::fabs(double(got.size()) - 4.0);
        for (std::size_t i = 0; i < std::min<std::size_t>(got.size(), 4); ++i) gap += got[i] != "good"[i];
        auto a = numeric(0.0, gap, 1e-9);
        TestReport t = with(id, a.passed ? Verdict::pass : Verdict::fail, {a});
        t.covered = {loc("m.src", 2)};
        out.push_back(t);
      } else {
        TestReport t = with(id, Verdict::pass, {categorical(true)});
        t.covered = {loc("m.src", id == "t_one" ? 1 : 3)};
        out.push_back(t);
      }
    }
    return out;
  }

  std::atomic<int> builds{0}, runs{0};
  bool throw_io = false, throw_protocol = false;
  std::vector<std::string> last_selection;
};

struct Rig {
  testutil::TempDir dir;
  SourceSnapshot snapshot;
  std::vector<SuspiciousStatement> lbs;
  Baseline baseline;
  std::shared_ptr<FakeRunner> runner = std::make_shared<FakeRunner>();
  std::vector<std::filesystem::path> slots;

  explicit Rig(int jobs = 1) : snapshot(snap({{"m.src", "one\nbadd\nthree\n"}})) {
    for (int i = 0; i < jobs; ++i) {
      slots.push_back(dir.path() / ("slot" + std::to_string(i)));
      materialize(snapshot, slots.back());
    }
    baseline = Baseline::from_reports(runner->run_tests(slots[0], TestSelection::everything()));
    runner->runs = 0;
    SuspiciousStatement s;
    s.location = loc("m.src", 2);
    for (const char* t : {"bad", "goods", "good", "gxod", "nobuild"}) s.replacement_candidates.emplace_back(t, Origin::fixture);
    s.insertion_candidates.emplace_back("zzz", Origin::fixture);
    SuspiciousStatement s3;
    s3.location = loc("m.src", 3);
    s3.replacement_candidates.emplace_back("three", Origin::fixture);
    lbs = {s, s3};
  }

  FitnessContext ctx() { return {lbs, &snapshot, &baseline, 0.5}; }

  PatchGenome pick(int p) {
    PatchGenome g(2);
    g.enabled[0] = 1;
    g.operation[0] = EditKind::replace;
    g.replace_pick[0] = p;
    return g;
  }
};

}  // namespace

TEST_CASE("assertion distance hand examples") {
  CHECK(assertion_distance(numeric(1.0, 1.5, 0.1)) == doctest::Approx(0.4 / 1.4).epsilon(1e-14));
  CHECK(assertion_distance(numeric(1.0, 1.05, 0.1)) == 0.0);
  CHECK(assertion_distance(categorical(false)) == 1.0);
  CHECK(assertion_distance(categorical(true)) == 0.0);
  CHECK(normalize_gap(0.4) == doctest::Approx(0.4 / 1.4));
  auto neg = numeric(0, 1, 0);
  neg.delta = -0.5;
  CHECK_THROWS_AS(assertion_distance(neg), Error);
}

TEST_CASE("assertion distance is zero inside delta, increasing and below one beyond") {
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double gap = i * 0.01;
    const double d = assertion_distance(numeric(0.0, gap, 0.5));
    if (gap < 0.5) CHECK(d == 0.0);
    else {
      CHECK(d >= 0.0);
      CHECK(d < 1.0);
      if (gap > 0.5) CHECK(d > prev);
    }
    prev = d;
  }
  // Continuity at delta.
  CHECK(assertion_distance(numeric(0.0, 0.5 + 1e-12, 0.5)) < 1e-11);
}

TEST_CASE("test failure rate hand examples") {
  // v(z) = 0.4 at z = 2/3.
  const TestReport two = with("t", Verdict::fail, {numeric(0, 0, 0.1), numeric(0, 2.0 / 3.0, 0)});
  CHECK(test_failure_rate(two) == doctest::Approx(0.2).epsilon(1e-12));
  const TestReport ok = with("t", Verdict::pass, {categorical(true), numeric(1, 1, 0.1), categorical(true)});
  CHECK(test_failure_rate(ok) == 0.0);
  CHECK(test_failure_rate(with("t", Verdict::timeout, {})) == 1.0);
  CHECK(test_failure_rate(with("t", Verdict::crash, {categorical(true)})) == 1.0);
  CHECK(test_failure_rate(with("t", Verdict::pass, {})) == 0.0);
  CHECK(test_failure_rate(with("t", Verdict::fail, {})) == 1.0);
}

TEST_CASE("f2 hand example and defaults") {
  // h = 0.6 needs v(z) = 0.6, z = 1.5.
  std::vector<TestReport> rs{with("p", Verdict::pass, {numeric(0, 0, 0.1)}),
                             with("n", Verdict::fail, {numeric(0, 1.5, 0)})};
  CHECK(test_failure_rate(rs[1]) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(weighted_failure(rs, 0.5) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(kDefaultFitnessWeight == 0.5);
  FitnessContext ctx;
  CHECK(ctx.w == 0.5);
  CHECK(weighted_failure({}, 0.5) == 0.0);
  std::vector<TestReport> passing{with("p", Verdict::pass, {categorical(true)})};
  CHECK(weighted_failure(passing, 0.5) == 0.0);
  std::vector<TestReport> failing{with("n", Verdict::fail, {categorical(false)})};
  CHECK(weighted_failure(failing, 0.5) == 0.5);
}

TEST_CASE("scaling gaps keeps pairwise f2 order on one-assertion tests") {
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> g(0.0, 10.0), s(0.01, 100.0);
  for (int round = 0; round < 2000; ++round) {
    const double a = g(gen), b = g(gen), k = s(gen);
    auto f2 = [](double gap) {
      std::vector<TestReport> rs{with("t", Verdict::fail, {numeric(0, gap, 0)})};
      return weighted_failure(rs, 0.5);
    };
    const int before = (f2(a) > f2(b)) - (f2(a) < f2(b));
    const int after = (f2(a * k) > f2(b * k)) - (f2(a * k) < f2(b * k));
    CHECK(before == after);
  }
}

TEST_CASE("feasible f2 stays within [0, 1 + w]") {
  std::mt19937 gen(4);
  for (int round = 0; round < 500; ++round) {
    std::vector<TestReport> rs;
    const int n = 1 + gen() % 6;
    for (int i = 0; i < n; ++i) {
      const auto v = static_cast<Verdict>(gen() % 4);
      rs.push_back(with("t" + std::to_string(i), v, {numeric(0, double(gen() % 50), 0.5)}));
    }
    const double w = (gen() % 10) / 5.0;
    const double f2 = weighted_failure(rs, w);
    CHECK(f2 >= 0.0);
    CHECK(f2 <= 1.0 + w);
  }
}

TEST_CASE("baseline bookkeeping") {
  Rig rig;
  CHECK(rig.baseline.all_ids == std::vector<std::string>{"t_one", "t_fix", "t_three"});
  CHECK(rig.baseline.failing == std::vector<std::string>{"t_fix"});
  CHECK(rig.baseline.passing_cover.at(loc("m.src", 1)) == std::vector<std::string>{"t_one"});
}

TEST_CASE("identity patch scores the unpatched program and is not plausible") {
  Rig rig;
  SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
  const FitnessVector f = ev.evaluate(PatchGenome(2));
  CHECK(f.f1 == 0.0);
  CHECK(f.f2 == doctest::Approx(weighted_failure(rig.baseline.reports, 0.5)));
  CHECK_FALSE(ev.is_plausible(PatchGenome(2)));
}

TEST_CASE("test selection: failing tests plus passing tests covering edits") {
  Rig rig;
  SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
  CHECK(ev.test_selection({}) == std::vector<std::string>{"t_fix"});
  const std::vector<Edit> e{{loc("m.src", 3), EditKind::replace, "x"}};
  CHECK(ev.test_selection(e) == std::vector<std::string>{"t_fix", "t_three"});
}

TEST_CASE("evaluation values, plausibility and caching") {
  Rig rig;
  SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
  std::vector<PatchGenome> batch{rig.pick(1), rig.pick(2), rig.pick(3), rig.pick(2), PatchGenome(2)};
  const auto res = ev.evaluate(batch);
  REQUIRE(res.size() == 5);
  // "goods": length gap 1, no char diffs -> v(1) = 0.5, weighted 0.25.
  CHECK(res[0].fitness.f1 == 1.0);
  CHECK(res[0].fitness.f2 == doctest::Approx(0.25));
  CHECK_FALSE(res[0].plausible);
  CHECK(res[1].fitness.f2 == 0.0);
  CHECK(res[1].plausible);
  // "gxod": one char diff -> 0.25 as well.
  CHECK(res[2].fitness.f2 == doctest::Approx(0.25));
  CHECK(res[3].patch_key == res[1].patch_key);
  CHECK(res[3].fitness == res[1].fitness);
  CHECK(ev.evaluations() == 5);
  CHECK(ev.subject_runs() == 4);
  const int runs = rig.runner->runs;
  const auto again = ev.evaluate(batch);
  CHECK(rig.runner->runs == runs);
  CHECK(ev.evaluations() == 10);
  CHECK(ev.subject_runs() == 4);
  for (std::size_t i = 0; i < batch.size(); ++i) CHECK(again[i].fitness == res[i].fitness);
  const std::vector<Edit> oracle{{loc("m.src", 2), EditKind::replace, "good"}};
  CHECK(ev.is_plausible(oracle));
}

TEST_CASE("build failure scores the infeasibility penalty with f1 kept") {
  Rig rig;
  SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
  const FitnessVector f = ev.evaluate(rig.pick(4));
  CHECK(f.f1 == 1.0);
  CHECK(f.f2 == kInfeasiblePenalty);
}

TEST_CASE("io failure surfaces as an error, protocol garbage as crashes") {
  {
    Rig rig;
    SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
    rig.runner->throw_io = true;
    CHECK_THROWS_AS(ev.evaluate(rig.pick(1)), Error);
  }
  {
    Rig rig;
    SubjectEvaluator ev(rig.ctx(), rig.slots, rig.runner);
    rig.runner->throw_protocol = true;
    const FitnessVector f = ev.evaluate(rig.pick(1));
    CHECK(f.f2 == doctest::Approx(0.5));
  }
}

TEST_CASE("parallel workspaces give the same results as one") {
  Rig one(1), three(3);
  SubjectEvaluator e1(one.ctx(), one.slots, one.runner), e3(three.ctx(), three.slots, three.runner);
  std::vector<PatchGenome> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(one.pick(i));
  PatchGenome two = one.pick(2);
  two.enabled[1] = 1;
  two.operation[1] = EditKind::remove;
  batch.push_back(two);
  const auto a = e1.evaluate(batch), b = e3.evaluate(batch);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].fitness == b[i].fitness);
    CHECK(a[i].plausible == b[i].plausible);
  }
  // The two-edit patch deletes t_three's statement; t_three still passes
  // in the fake, so only f1 differs from the single fix.
  CHECK(a.back().fitness.f1 == 2.0);
}
