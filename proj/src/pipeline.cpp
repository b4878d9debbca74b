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

#include "evorepair/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "evorepair/candidates.hpp"
#include "evorepair/error.hpp"
#include "evorepair/prompt.hpp"
#include "evorepair/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace evorepair {

const char* to_string(ProviderKind kind) noexcept {
  switch (kind) {
    case ProviderKind::automatic: return "auto";
    case ProviderKind::endpoint: return "endpoint";
    case ProviderKind::redundancy: return "redundancy";
    case ProviderKind::fixture: return "fixture";
    case ProviderKind::merge: return "merge";
  }
  return "auto";
}

ProviderKind provider_from_string(std::string_view name) {
  for (ProviderKind k : {ProviderKind::automatic, ProviderKind::endpoint, ProviderKind::redundancy,
                         ProviderKind::fixture, ProviderKind::merge})
    if (name == to_string(k)) return k;
  fail(ErrorKind::config, "unknown provider '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Options

void RunOptions::apply(const json& j) {
  if (j.is_null()) return;
  if (!j.is_object()) fail(ErrorKind::config, "run options must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (v.is_null()) continue;
    try {
      if (k == "gamma_min") gamma_min = v.get<double>();
      else if (k == "n_max") n_max = v.get<int>();
      else if (k == "pop") pop = v.get<int>();
      else if (k == "gens") gens = v.get<int>();
      else if (k == "w") w = v.get<double>();
      else if (k == "mu") mu = v.get<double>();
      else if (k == "seed") seed = v.get<std::uint64_t>();
      else if (k == "jobs") jobs = v.get<int>();
      else if (k == "max_tokens") max_tokens = v.get<int>();
      else if (k == "provider") provider = provider_from_string(v.get<std::string>());
      else if (k == "endpoint_url") endpoint_url = v.get<std::string>();
      else if (k == "stop_mode") stop_mode = stop_mode_from_string(v.get<std::string>());
      else if (k == "time_limit") time_limit = v.get<double>();
      else if (k == "candidates") candidates_dir = fs::path(v.get<std::string>());
      else if (k == "out") out_dir = fs::path(v.get<std::string>());
      else if (k == "sequences_per_mode") sequences_per_mode = v.get<int>();
      else if (k == "redundancy_limit") redundancy_limit = v.get<int>();
      else if (k == "sampling") {
        sampling.top_p = v.value("top_p", sampling.top_p);
        sampling.top_k = v.value("top_k", sampling.top_k);
        sampling.temperature = v.value("temperature", sampling.temperature);
        sampling.num_return_sequences = v.value("num_return_sequences", sampling.num_return_sequences);
        sampling.max_new_tokens = v.value("max_new_tokens", sampling.max_new_tokens);
      } else
        fail(ErrorKind::config, "unknown option '" + k + "'");
    } catch (const json::exception& e) {
      fail(ErrorKind::config, "option '" + k + "': " + e.what());
    }
  }
}

void RunOptions::validate() const {
  if (!(gamma_min >= 0.0 && gamma_min <= 1.0)) fail(ErrorKind::config, "gamma_min must lie in [0, 1]");
  if (n_max < 1) fail(ErrorKind::config, "n_max must be at least 1");
  if (jobs < 1) fail(ErrorKind::config, "jobs must be at least 1");
  if (max_tokens < 64) fail(ErrorKind::config, "max_tokens must be at least 64");
  if (sequences_per_mode < 1) fail(ErrorKind::config, "sequences_per_mode must be at least 1");
  if (redundancy_limit < 0) fail(ErrorKind::config, "redundancy_limit must not be negative");
  EvolutionConfig{pop, gens, w, mu, seed, stop_mode, time_limit}.validate();
  sampling.validate();
}

RunOptions RunOptions::resolve(const SubjectConfig& subject, const json& flags) {
  RunOptions o;
  o.apply(subject.overrides);
  o.apply(flags);
  o.validate();
  return o;
}

json RunOptions::echo() const {
  return {{"gamma_min", gamma_min},
          {"n_max", n_max},
          {"pop", pop},
          {"gens", gens},
          {"w", w},
          {"mu", mu},
          {"seed", seed},
          {"max_tokens", max_tokens},
          {"provider", to_string(provider)},
          {"stop_mode", to_string(stop_mode)},
          {"time_limit", time_limit},
          {"sequences_per_mode", sequences_per_mode},
          {"redundancy_limit", redundancy_limit},
          {"sampling",
           {{"top_p", sampling.top_p},
            {"top_k", sampling.top_k},
            {"temperature", sampling.temperature},
            {"num_return_sequences", sampling.num_return_sequences},
            {"max_new_tokens", sampling.max_new_tokens}}}};
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

void write_text(const fs::path& file, std::string_view text) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + file.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::io, "cannot write " + file.string());
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::io, "cannot open " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::parse, file.string() + " is not valid JSON");
  return j;
}

std::string numbered(const char* stem, std::size_t i, int width) {
  std::ostringstream s;
  s << stem << std::setw(width) << std::setfill('0') << i;
  return s.str();
}

json location_json(const StatementLocation& l) {
  return {{"file", l.file}, {"line_start", l.line_start}, {"line_end", l.line_end}};
}

std::int64_t ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

/// Copies the subject tree into dst, leaving out `skip` (the output
/// directory, when it sits inside the subject).
void copy_tree(const fs::path& src, const fs::path& dst, const std::optional<fs::path>& skip) {
  fs::create_directories(dst);
  for (auto it = fs::recursive_directory_iterator(src); it != fs::recursive_directory_iterator(); ++it) {
    const fs::path rel = fs::relative(it->path(), src);
    if (skip && fs::equivalent(it->path(), *skip)) {
      it.disable_recursion_pending();
      continue;
    }
    const fs::path target = dst / rel;
    if (it->is_directory())
      fs::create_directories(target);
    else if (it->is_regular_file())
      fs::copy_file(it->path(), target, fs::copy_options::overwrite_existing);
  }
}

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<TestReport> map_coverage(std::vector<TestReport> reports,
                                     const std::vector<StatementLocation>& statements) {
  std::map<std::string, std::vector<const StatementLocation*>> by_file;
  for (const auto& s : statements) by_file[s.file].push_back(&s);
  for (TestReport& r : reports) {
    std::set<StatementLocation> mapped;
    for (const StatementLocation& c : r.covered) {
      auto it = by_file.find(c.file);
      if (it == by_file.end()) continue;
      for (const StatementLocation* s : it->second)
        if (s->overlaps(c)) mapped.insert(*s);
    }
    r.covered.assign(mapped.begin(), mapped.end());
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Session

RepairSession::RepairSession(SubjectConfig subject, RunOptions options)
    : subject_(std::move(subject)), options_(std::move(options)) {
  options_.validate();
  snapshot_ = load_sources(subject_);
  runner_ = std::make_shared<CommandRunner>(subject_);
}

RepairSession::~RepairSession() {
  if (!scratch_.empty()) {
    std::error_code ec;
    fs::remove_all(scratch_, ec);
  }
}

fs::path RepairSession::output_dir() const { return options_.out_dir / subject_.id; }

fs::path RepairSession::workspace(std::size_t slot) {
  if (scratch_.empty()) {
    static std::atomic<int> counter{0};
    scratch_ = fs::temp_directory_path() /
               ("evorepair-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + subject_.id);
    fs::remove_all(scratch_);
  }
  while (workspaces_.size() <= slot) {
    const fs::path ws = scratch_ / ("slot" + std::to_string(workspaces_.size()));
    std::optional<fs::path> skip;
    const fs::path out_abs = fs::absolute(output_dir());
    if (fs::exists(out_abs)) skip = out_abs;
    copy_tree(subject_.root, ws, skip);
    workspaces_.push_back(ws);
  }
  return workspaces_[slot];
}

void RepairSession::ensure_localized() {
  if (!localized_) localize();
}

const std::vector<SuspiciousStatement>& RepairSession::localize() {
  const fs::path ws = workspace(0);
  if (!runner_->build(ws)) fail(ErrorKind::evaluation, "build of the unpatched subject failed");
  std::vector<TestReport> reports = runner_->run_tests(ws, TestSelection::everything());
  if (reports.empty()) fail(ErrorKind::evaluation, "test command reported no tests");

  std::vector<StatementLocation> statements;
  for (const auto& [path, text] : snapshot_.files()) {
    auto s = segment_file(path, text, subject_.comment_prefixes);
    statements.insert(statements.end(), s.begin(), s.end());
  }
  reports = map_coverage(std::move(reports), statements);
  baseline_ = Baseline::from_reports(reports);
  if (baseline_.failing.empty()) fail(ErrorKind::evaluation, "the unpatched subject passes every test");

  const CoverageSpectrum spectrum = ingest_spectrum(reports, statements);
  const RegionStyle style = subject_.region_style;
  lbs_ = select_lbs(spectrum, options_.gamma_min, options_.n_max, snapshot_,
                    [style](const std::vector<std::string>& lines, const StatementLocation& loc) {
                      return find_enclosing_region(lines, loc, style);
                    });
  localized_ = true;
  have_candidates_ = false;

  json j;
  j["subject"] = subject_.id;
  j["tests"] = baseline_.all_ids.size();
  j["failing"] = baseline_.failing;
  j["statements"] = localization_report(lbs_);
  write_json(output_dir() / "localization.json", j);
  return lbs_;
}

namespace {

SymbolCatalog catalog_for(const SubjectConfig& subject, const std::string& file) {
  if (!subject.catalog_path) return {};
  return SymbolCatalog::load_for(*subject.catalog_path, file);
}

}  // namespace

std::size_t RepairSession::write_prompts() {
  ensure_localized();
  PromptOptions po;
  po.max_tokens = options_.max_tokens;
  po.comment_prefix = subject_.prompt_comment;
  json index = json::array();
  std::size_t written = 0;
  for (std::size_t i = 0; i < lbs_.size(); ++i) {
    const SuspiciousStatement& s = lbs_[i];
    const SymbolCatalog catalog = catalog_for(subject_, s.location.file);
    for (PromptMode mode : {PromptMode::replace, PromptMode::insert}) {
      const PromptBundle p = build_prompt(s, mode, catalog, snapshot_.text(s.location.file), po);
      const std::string name = numbered("lbs_", i, 3) + "_" + to_string(mode) + ".txt";
      write_text(output_dir() / "prompts" / name, p.text);
      index.push_back({{"file", name},
                       {"location", s.location.key()},
                       {"mode", to_string(mode)},
                       {"tokens", p.token_count},
                       {"truncated_before", p.truncated_before},
                       {"truncated_after", p.truncated_after}});
      ++written;
    }
  }
  write_json(output_dir() / "prompts" / "index.json", index);
  return written;
}

std::size_t RepairSession::build_candidates() {
  ensure_localized();
  ProviderKind kind = options_.provider;
  if (kind == ProviderKind::automatic) {
    if (subject_.fixtures_path)
      kind = ProviderKind::fixture;
    else if (!options_.endpoint_url.empty())
      kind = ProviderKind::endpoint;
    else
      kind = ProviderKind::redundancy;
  }
  const bool use_endpoint =
      kind == ProviderKind::endpoint || (kind == ProviderKind::merge && !options_.endpoint_url.empty());
  const bool use_fixture =
      kind == ProviderKind::fixture || (kind == ProviderKind::merge && options_.endpoint_url.empty());
  const bool use_redundancy = kind == ProviderKind::redundancy || kind == ProviderKind::merge;

  std::optional<FixtureBook> book;
  if (use_fixture) {
    if (!subject_.fixtures_path) fail(ErrorKind::config, "fixture provider selected but the subject has no fixtures");
    book = FixtureBook::load(*subject_.fixtures_path);
  }
  std::optional<InfillClient> client;
  if (use_endpoint) {
    if (options_.endpoint_url.empty()) fail(ErrorKind::config, "endpoint provider selected without an endpoint URL");
    EndpointConfig ec;
    ec.base_url = options_.endpoint_url;
    ec.max_in_flight = std::max(1, options_.jobs);
    client.emplace(ec);
  }

  PromptOptions po;
  po.max_tokens = options_.max_tokens;
  po.comment_prefix = subject_.prompt_comment;
  const CandidateValidator validator(subject_.validator_command, subject_.root);
  const auto prefixes = subject_.comment_prefixes;
  const Segmenter segment = [prefixes](std::string_view text) { return segment_statements(text, prefixes); };
  const Validator valid = [&validator](std::string_view text) { return validator(text); };

  std::vector<int> failures(lbs_.size(), 0);
  parallel_for(lbs_.size(), options_.jobs, [&](std::size_t i) {
    SuspiciousStatement& s = lbs_[i];
    std::vector<RawSequence> extra;
    if (use_redundancy)
      extra = redundancy_sequences(s, snapshot_, prefixes, static_cast<std::size_t>(options_.redundancy_limit));
    const SymbolCatalog catalog = use_endpoint ? catalog_for(subject_, s.location.file) : SymbolCatalog{};
    for (PromptMode mode : {PromptMode::replace, PromptMode::insert}) {
      std::vector<RawSequence> primary;
      if (book) primary = book->sequences(s.location, mode);
      if (client) {
        try {
          const PromptBundle p = build_prompt(s, mode, catalog, snapshot_.text(s.location.file), po);
          primary = client->request_infill(p, options_.sampling, options_.sequences_per_mode);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::provider && e.kind() != ErrorKind::budget) throw;
          ++failures[i];
        }
      }
      const auto a = sequences_to_candidates(primary, segment, valid);
      const auto b = sequences_to_candidates(extra, segment, valid);
      const bool replace = mode == PromptMode::replace;
      auto merged = merge_spaces(dedupe_and_prune(a, s.original_text, replace),
                                 dedupe_and_prune(b, s.original_text, replace));
      (replace ? s.replacement_candidates : s.insertion_candidates) = std::move(merged);
    }
  });

  provider_failures_ = 0;
  std::size_t total = 0;
  int requested = 0;
  for (std::size_t i = 0; i < lbs_.size(); ++i) {
    provider_failures_ += failures[i];
    requested += 2;
    total += lbs_[i].replacement_candidates.size() + lbs_[i].insertion_candidates.size();
  }
  if (use_endpoint && !lbs_.empty() && provider_failures_ == requested && !use_redundancy)
    fail(ErrorKind::provider, "every infill request failed (" + std::to_string(requested) + " requests)");

  const fs::path dir = output_dir() / "candidates";
  fs::create_directories(dir);
  for (std::size_t i = 0; i < lbs_.size(); ++i)
    write_json(dir / (numbered("lbs_", i, 3) + ".json"), candidate_set_to_json(lbs_[i], failures[i]));
  have_candidates_ = true;
  return total;
}

std::size_t RepairSession::load_candidates(const fs::path& dir) {
  ensure_localized();
  if (!fs::is_directory(dir)) fail(ErrorKind::io, "candidate directory " + dir.string() + " does not exist");
  provider_failures_ = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < lbs_.size(); ++i) {
    const fs::path file = dir / (numbered("lbs_", i, 3) + ".json");
    if (!fs::exists(file))
      fail(ErrorKind::config, "candidate set " + file.string() + " is missing; rerun the candidates stage");
    StoredCandidateSet set = candidate_set_from_json(read_json(file));
    if (set.location != lbs_[i].location)
      fail(ErrorKind::config, "candidate set " + file.string() + " is for " + set.location.key() + ", expected " +
                                  lbs_[i].location.key());
    lbs_[i].replacement_candidates = std::move(set.replace);
    lbs_[i].insertion_candidates = std::move(set.insert);
    provider_failures_ += set.provider_failures;
    total += lbs_[i].replacement_candidates.size() + lbs_[i].insertion_candidates.size();
  }
  have_candidates_ = true;
  return total;
}

bool RepairSession::run_suite_on(const SourceSnapshot& snap) {
  if (!validate_space_) {
    // One past the evaluator slots, so revalidation never disturbs them.
    validate_space_ = workspace(static_cast<std::size_t>(options_.jobs));
  }
  materialize(snap, *validate_space_);
  if (!runner_->build(*validate_space_)) return false;
  std::vector<TestReport> reports;
  try {
    reports = runner_->run_tests(*validate_space_, TestSelection::everything());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::protocol) throw;
    return false;
  }
  return !reports.empty() &&
         std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.verdict == Verdict::pass; });
}

json RepairSession::repair() {
  const auto t0 = std::chrono::steady_clock::now();
  ensure_localized();
  const auto t_localized = std::chrono::steady_clock::now();
  if (!have_candidates_) {
    if (options_.candidates_dir)
      load_candidates(*options_.candidates_dir);
    else
      build_candidates();
  }
  const auto t_candidates = std::chrono::steady_clock::now();

  std::vector<fs::path> slots;
  for (int s = 0; s < options_.jobs; ++s) slots.push_back(workspace(static_cast<std::size_t>(s)));
  FitnessContext ctx{lbs_, &snapshot_, &baseline_, options_.w};
  SubjectEvaluator evaluator(ctx, slots, runner_);
  EvolutionConfig ec{options_.pop, options_.gens, options_.w, options_.mu, options_.seed, options_.stop_mode,
                     options_.time_limit};
  Rng rng(options_.seed);
  const EvolutionResult result = evolve(lbs_, evaluator, ec, rng);
  const auto t_search = std::chrono::steady_clock::now();

  const fs::path out = output_dir();
  fs::remove_all(out / "patches");
  const std::vector<ArchiveEntry> best = smallest_patches(result.archive, 10);
  json archive = json::array();
  for (std::size_t i = 0; i < best.size(); ++i) {
    const ArchiveEntry& e = best[i];
    const std::vector<Edit> edits = decode_genome(e.genome, lbs_);
    const SourceSnapshot patched = apply_edits(snapshot_, edits);
    const std::string diff = render_diff(snapshot_, patched);
    const std::string name = numbered("patch_", i, 2) + ".diff";
    write_text(out / "patches" / name, diff);
    const bool applies = apply_unified_diff(snapshot_, diff) == patched;
    const bool revalidated = applies && run_suite_on(patched);
    std::size_t discovery = 0;
    for (std::size_t k = 0; k < result.archive.size(); ++k)
      if (result.archive[k].patch_key == e.patch_key) discovery = k;
    json edit_list = json::array();
    for (const Edit& ed : edits)
      edit_list.push_back({{"location", location_json(ed.location)}, {"kind", to_string(ed.kind)}, {"text", ed.text}});
    archive.push_back({{"diff", "patches/" + name},
                       {"f1", e.fitness.f1},
                       {"f2", e.fitness.f2},
                       {"evaluations_at_discovery", e.evaluations_at_discovery},
                       {"generation", e.generation},
                       {"discovery_index", discovery},
                       {"edits", edit_list},
                       {"revalidated", revalidated}});
  }
  // Leave the validation workspace pristine for later stages.
  if (validate_space_) materialize(snapshot_, *validate_space_);
  const auto t_end = std::chrono::steady_clock::now();

  json lbs_summary = json::array();
  for (const auto& s : lbs_)
    lbs_summary.push_back({{"location", location_json(s.location)},
                           {"susp", s.susp},
                           {"replace_candidates", s.replacement_candidates.size()},
                           {"insert_candidates", s.insertion_candidates.size()}});
  json report;
  report["subject"] = subject_.id;
  report["config"] = options_.echo();
  report["baseline"] = {{"tests", baseline_.all_ids.size()}, {"failing", baseline_.failing}};
  report["lbs"] = lbs_summary;
  report["archive"] = archive;
  json progress = json::array();
  for (const GenerationSummary& g : result.generations)
    progress.push_back({{"generation", g.generation}, {"best_f1", g.best.f1}, {"best_f2", g.best.f2}});
  report["progress"] = progress;
  json totals;
  totals["evaluations"] = result.evaluations;
  totals["subject_runs"] = evaluator.subject_runs();
  totals["generations"] = result.generations.size();
  totals["provider_failures"] = provider_failures_;
  totals["plausible_patches"] = result.archive.size();
  totals["first_plausible_evaluations"] =
      result.archive.empty() ? json(nullptr) : json(result.archive.front().evaluations_at_discovery);
  totals["stop_reason"] = result.stop_reason;
  report["totals"] = totals;
  if (result.error) report["error"] = *result.error;
  write_json(out / "report.json", report);

  auto ms = [](auto a, auto b) { return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count(); };
  write_json(out / "timing.json", {{"wall_ms", ms(t0, t_end)},
                                   {"localize_ms", ms(t0, t_localized)},
                                   {"candidates_ms", ms(t_localized, t_candidates)},
                                   {"search_ms", ms(t_candidates, t_search)},
                                   {"revalidate_ms", ms(t_search, t_end)}});
  if (result.error) fail(ErrorKind::evaluation, "search aborted: " + *result.error);
  return report;
}

bool RepairSession::validate(const fs::path& diff) {
  std::ifstream in(diff, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open diff " + diff.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const SourceSnapshot patched = apply_unified_diff(snapshot_, ss.str());
  const bool ok = run_suite_on(patched);
  materialize(snapshot_, *validate_space_);
  return ok;
}

// ---------------------------------------------------------------------------
// Bench

json run_bench(const fs::path& corpus, const json& flags) {
  if (!fs::is_directory(corpus)) fail(ErrorKind::config, "corpus " + corpus.string() + " is not a directory");
  std::vector<fs::path> subjects;
  for (const auto& e : fs::directory_iterator(corpus))
    if (e.is_directory() && fs::exists(e.path() / "subject.json")) subjects.push_back(e.path());
  std::sort(subjects.begin(), subjects.end());
  if (subjects.empty()) fail(ErrorKind::config, "corpus " + corpus.string() + " holds no subjects");

  fs::path out_dir = "out";
  if (flags.is_object() && flags.contains("out") && flags["out"].is_string()) out_dir = flags["out"].get<std::string>();

  std::vector<BenchRow> rows;
  std::string stop_mode;
  for (const fs::path& dir : subjects) {
    BenchRow row;
    row.subject = dir.filename().string();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SubjectConfig cfg = SubjectConfig::load(dir);
      row.subject = cfg.id;
      RunOptions opts = RunOptions::resolve(cfg, flags);
      stop_mode = to_string(opts.stop_mode);
      RepairSession session(std::move(cfg), std::move(opts));
      const json report = session.repair();
      row.evaluations = report["totals"]["evaluations"].get<std::size_t>();
      row.archive_size = report["archive"].size();
      row.solved = row.archive_size > 0;
      if (row.solved) {
        row.cost = report["totals"]["first_plausible_evaluations"].get<std::size_t>();
        row.min_edits = static_cast<int>(report["archive"][0]["f1"].get<double>());
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wall_ms = ms_since(t0);
    rows.push_back(std::move(row));
  }

  json j;
  j["corpus"] = corpus.filename().string();
  j["stop_mode"] = stop_mode;
  json arr = json::array();
  double sum = 0;
  std::size_t solved = 0;
  std::ostringstream csv;
  csv << "subject,solved,cost,evaluations,archive_size,min_edits,wall_ms,error\n";
  for (const BenchRow& r : rows) {
    json e = {{"subject", r.subject},
              {"solved", r.solved},
              {"cost", r.cost ? json(*r.cost) : json(nullptr)},
              {"evaluations", r.evaluations},
              {"archive_size", r.archive_size},
              {"min_edits", r.min_edits},
              {"wall_ms", r.wall_ms}};
    if (!r.error.empty()) e["error"] = r.error;
    arr.push_back(e);
    if (r.cost) {
      sum += static_cast<double>(*r.cost);
      ++solved;
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    csv << r.subject << ',' << (r.solved ? 1 : 0) << ',' << (r.cost ? std::to_string(*r.cost) : "") << ','
        << r.evaluations << ',' << r.archive_size << ',' << r.min_edits << ',' << r.wall_ms << ",\"" << err << "\"\n";
  }
  j["subjects"] = arr;
  j["solved"] = solved;
  j["total"] = rows.size();
  j["mean_cost"] = solved ? json(sum / static_cast<double>(solved)) : json(nullptr);
  write_json(out_dir / "bench.json", j);
  write_text(out_dir / "bench.csv", csv.str());
  return j;
}

}  // namespace evorepair
