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

// evorepair command line. Exit status: 0 success, 1 no plausible patch
// (or a failing suite under validate), 2 configuration, provider or other
// errors.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "evorepair/evorepair.h"

using nlohmann::json;

namespace {

struct Flags {
  std::string subject;
  std::optional<unsigned long long> seed;
  std::optional<int> jobs, n_max, pop, gens, max_tokens;
  std::optional<double> gamma_min, w, mu, time_limit;
  std::optional<std::string> provider, endpoint_url, stop_mode, candidates, out;

  json to_json() const {
    json j = json::object();
    auto put = [&j](const char* k, const auto& v) {
      if (v) j[k] = *v;
    };
    put("seed", seed);
    put("jobs", jobs);
    put("n_max", n_max);
    put("pop", pop);
    put("gens", gens);
    put("max_tokens", max_tokens);
    put("gamma_min", gamma_min);
    put("w", w);
    put("mu", mu);
    put("time_limit", time_limit);
    put("provider", provider);
    put("endpoint_url", endpoint_url);
    put("stop_mode", stop_mode);
    put("candidates", candidates);
    put("out", out);
    return j;
  }
};

void add_run_flags(CLI::App* cmd, Flags& f, bool needs_subject) {
  auto* s = cmd->add_option("--subject", f.subject, "Subject config file or directory");
  if (needs_subject) s->required();
  cmd->add_option("--seed", f.seed, "Random seed (default 42)");
  cmd->add_option("--jobs", f.jobs, "Parallel evaluation workspaces");
  cmd->add_option("--gamma-min", f.gamma_min, "Suspiciousness threshold");
  cmd->add_option("--n-max", f.n_max, "Maximum number of likely-buggy statements");
  cmd->add_option("--pop", f.pop, "Population size");
  cmd->add_option("--gens", f.gens, "Maximum generations");
  cmd->add_option("--w", f.w, "Weight of originally passing tests in f2");
  cmd->add_option("--mu", f.mu, "Initial enable probability factor");
  cmd->add_option("--max-tokens", f.max_tokens, "Prompt token budget");
  cmd->add_option("--provider", f.provider, "Candidate provider")
      ->check(CLI::IsMember({"auto", "endpoint", "redundancy", "fixture", "merge"}));
  cmd->add_option("--endpoint-url", f.endpoint_url, "Infill endpoint base URL");
  cmd->add_option("--stop-mode", f.stop_mode, "full_budget or first_plausible")
      ->check(CLI::IsMember({"full_budget", "first_plausible"}));
  cmd->add_option("--time-limit", f.time_limit, "Wall clock limit per subject, seconds");
  cmd->add_option("--candidates", f.candidates, "Directory of pre-generated candidate sets");
  cmd->add_option("--out", f.out, "Output root (default ./out)");
}

int exit_code(er_status st) {
  if (st == ER_OK) return 0;
  if (st == ER_NO_PLAUSIBLE) return 1;
  return 2;
}

int report_error(er_status st) {
  std::fprintf(stderr, "evorepair: %s\n", er_last_error());
  return exit_code(st);
}

struct Session {
  er_session* handle = nullptr;
  ~Session() { er_session_close(handle); }
};

int open_session(const Flags& f, Session& s) {
  const std::string opts = f.to_json().dump();
  const er_status st = er_session_open(f.subject.c_str(), opts.c_str(), &s.handle);
  return st == ER_OK ? 0 : report_error(st);
}

void print_repair_summary(const json& report) {
  const auto& archive = report["archive"];
  std::printf("subject %s: %zu plausible patch(es) archived, %s evaluations\n",
              report["subject"].get<std::string>().c_str(), archive.size(),
              report["totals"]["evaluations"].dump().c_str());
  for (const auto& e : archive)
    std::printf("  %s  f1=%s f2=%s evaluations_at_discovery=%s revalidated=%s\n",
                e["diff"].get<std::string>().c_str(), e["f1"].dump().c_str(), e["f2"].dump().c_str(),
                e["evaluations_at_discovery"].dump().c_str(), e["revalidated"].get<bool>() ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary program repair with infill-generated candidate statements"};
  app.require_subcommand(1);
  app.set_version_flag("--version", er_version());

  Flags f;
  auto* localize = app.add_subcommand("localize", "Rank likely-buggy statements");
  auto* prompts = app.add_subcommand("prompts", "Write infill prompts per statement and mode");
  auto* candidates = app.add_subcommand("candidates", "Generate candidate sets");
  auto* repair = app.add_subcommand("repair", "Search for plausible patches");
  auto* validate = app.add_subcommand("validate", "Run the full suite with a diff applied");
  auto* bench = app.add_subcommand("bench", "Repair every subject of a corpus");
  for (auto* c : {localize, prompts, candidates, repair, validate}) add_run_flags(c, f, true);
  add_run_flags(bench, f, false);
  std::string diff_path, corpus;
  validate->add_option("diff", diff_path, "Unified diff to validate")->required();
  bench->add_option("corpus", corpus, "Corpus directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (bench->parsed()) {
    char* out = nullptr;
    const std::string opts = f.to_json().dump();
    const er_status st = er_bench(corpus.c_str(), opts.c_str(), &out);
    if (st != ER_OK) return report_error(st);
    const json j = json::parse(out);
    er_string_free(out);
    for (const auto& s : j["subjects"])
      std::printf("%-24s %-8s cost=%s%s\n", s["subject"].get<std::string>().c_str(),
                  s["solved"].get<bool>() ? "solved" : "unsolved", s["cost"].dump().c_str(),
                  s.contains("error") ? ("  error: " + s["error"].get<std::string>()).c_str() : "");
    std::printf("solved %s/%s, mean cost %s\n", j["solved"].dump().c_str(), j["total"].dump().c_str(),
                j["mean_cost"].dump().c_str());
    return 0;
  }

  Session s;
  if (int rc = open_session(f, s)) return rc;
  const char* dir = er_session_output_dir(s.handle);

  if (localize->parsed()) {
    std::size_t n = 0;
    const er_status st = er_localize(s.handle, &n);
    if (st != ER_OK) return report_error(st);
    std::printf("%zu likely-buggy statement(s), see %s/localization.json\n", n, dir);
    return 0;
  }
  if (prompts->parsed()) {
    std::size_t n = 0;
    const er_status st = er_prompts(s.handle, &n);
    if (st != ER_OK) return report_error(st);
    std::printf("%zu prompt(s) written to %s/prompts\n", n, dir);
    return 0;
  }
  if (candidates->parsed()) {
    std::size_t n = 0;
    const er_status st = er_candidates(s.handle, &n);
    if (st != ER_OK) return report_error(st);
    std::printf("%zu candidate statement(s) written to %s/candidates\n", n, dir);
    return 0;
  }
  if (repair->parsed()) {
    std::size_t n = 0;
    char* out = nullptr;
    const er_status st = er_repair(s.handle, &n, &out);
    if (st != ER_OK && st != ER_NO_PLAUSIBLE) return report_error(st);
    print_repair_summary(json::parse(out));
    er_string_free(out);
    return exit_code(st);
  }
  const er_status st = er_validate(s.handle, diff_path.c_str());
  if (st != ER_OK && st != ER_NO_PLAUSIBLE) return report_error(st);
  std::printf("%s\n", st == ER_OK ? "plausible: full suite passes" : "not plausible: the suite fails");
  return exit_code(st);
}
