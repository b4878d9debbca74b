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

#include "evorepair/evorepair.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "evorepair/error.hpp"
#include "evorepair/pipeline.hpp"

using evorepair::Error;
using evorepair::ErrorKind;
using nlohmann::json;

struct er_session {
  std::unique_ptr<evorepair::RepairSession> impl;
  std::string out_dir;
};

namespace {

thread_local std::string g_last_error;

er_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::budget:
      return ER_ERR_CONFIG;
    case ErrorKind::provider:
      return ER_ERR_PROVIDER;
    case ErrorKind::io:
      return ER_ERR_IO;
    case ErrorKind::parse:
    case ErrorKind::protocol:
      return ER_ERR_PARSE;
    case ErrorKind::evaluation:
      return ER_ERR_EVALUATION;
    case ErrorKind::contract:
    case ErrorKind::domain:
      return ER_ERR_INTERNAL;
  }
  return ER_ERR_INTERNAL;
}

/// Runs fn, mapping exceptions to a status and a stage-prefixed message.
template <typename Fn>
er_status guarded(const char* stage, Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = std::string(stage) + ": " + evorepair::to_string(e.kind()) + ": " + e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string(stage) + ": parse error: " + e.what();
    return ER_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = std::string(stage) + ": I/O error: " + e.what();
    return ER_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = std::string(stage) + ": " + e.what();
    return ER_ERR_INTERNAL;
  }
}

er_status bad_argument(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return ER_ERR_ARGUMENT;
}

json parse_options(const char* options_json) {
  if (!options_json || !*options_json) return json::object();
  json j = json::parse(options_json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) evorepair::fail(ErrorKind::config, "options must be a JSON object");
  return j;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* er_version(void) { return "0.1.0"; }

const char* er_status_name(er_status status) {
  switch (status) {
    case ER_OK: return "ok";
    case ER_NO_PLAUSIBLE: return "no_plausible";
    case ER_ERR_ARGUMENT: return "argument";
    case ER_ERR_CONFIG: return "config";
    case ER_ERR_PROVIDER: return "provider";
    case ER_ERR_IO: return "io";
    case ER_ERR_PARSE: return "parse";
    case ER_ERR_EVALUATION: return "evaluation";
    case ER_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* er_last_error(void) { return g_last_error.c_str(); }

void er_string_free(char* s) { std::free(s); }

er_status er_session_open(const char* subject, const char* options_json, er_session** out) {
  if (!subject || !out) return bad_argument("subject and out must not be null");
  *out = nullptr;
  return guarded("open", [&] {
    evorepair::SubjectConfig cfg = evorepair::SubjectConfig::load(subject);
    evorepair::RunOptions opts = evorepair::RunOptions::resolve(cfg, parse_options(options_json));
    auto s = std::make_unique<er_session>();
    s->impl = std::make_unique<evorepair::RepairSession>(std::move(cfg), std::move(opts));
    s->out_dir = s->impl->output_dir().string();
    *out = s.release();
    return ER_OK;
  });
}

void er_session_close(er_session* session) { delete session; }

const char* er_session_output_dir(const er_session* session) {
  return session ? session->out_dir.c_str() : "";
}

er_status er_localize(er_session* session, size_t* lbs_count) {
  if (!session) return bad_argument("null session");
  return guarded("localize", [&] {
    const auto& lbs = session->impl->localize();
    if (lbs_count) *lbs_count = lbs.size();
    return ER_OK;
  });
}

er_status er_prompts(er_session* session, size_t* prompt_count) {
  if (!session) return bad_argument("null session");
  return guarded("prompts", [&] {
    const std::size_t n = session->impl->write_prompts();
    if (prompt_count) *prompt_count = n;
    return ER_OK;
  });
}

er_status er_candidates(er_session* session, size_t* candidate_count) {
  if (!session) return bad_argument("null session");
  return guarded("candidates", [&] {
    const std::size_t n = session->impl->build_candidates();
    if (candidate_count) *candidate_count = n;
    return ER_OK;
  });
}

er_status er_repair(er_session* session, size_t* archive_size, char** report_json) {
  if (!session) return bad_argument("null session");
  if (report_json) *report_json = nullptr;
  return guarded("repair", [&] {
    const json report = session->impl->repair();
    const std::size_t n = report["archive"].size();
    if (archive_size) *archive_size = n;
    if (report_json) *report_json = dup_string(report.dump(2));
    return n > 0 ? ER_OK : ER_NO_PLAUSIBLE;
  });
}

er_status er_validate(er_session* session, const char* diff_path) {
  if (!session || !diff_path) return bad_argument("null session or diff path");
  return guarded("validate", [&] { return session->impl->validate(diff_path) ? ER_OK : ER_NO_PLAUSIBLE; });
}

er_status er_bench(const char* corpus_dir, const char* options_json, char** report_json) {
  if (!corpus_dir) return bad_argument("null corpus directory");
  if (report_json) *report_json = nullptr;
  return guarded("bench", [&] {
    const json report = evorepair::run_bench(corpus_dir, parse_options(options_json));
    if (report_json) *report_json = dup_string(report.dump(2));
    return ER_OK;
  });
}

}  // extern "C"
