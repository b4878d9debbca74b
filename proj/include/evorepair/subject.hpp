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

// The boundary to the program under repair: its configuration, statement
// segmentation, candidate validity, and build/test execution.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorepair/patch.hpp"
#include "evorepair/types.hpp"

namespace evorepair {

/// How the surrounding function of a statement is found.
enum class RegionStyle : std::uint8_t {
  braces,  // innermost brace block opened by a function-like header
  indent,  // nearest enclosing `def`-style header by indentation
};

struct SubjectConfig {
  std::filesystem::path root;
  std::string id;
  std::vector<std::string> source_globs;
  std::optional<std::string> build_command;
  /// Shell command; "{tests}" is replaced by the selection argument, or the
  /// argument is appended when the placeholder is absent.
  std::string test_command;
  std::int64_t per_test_timeout_ms = 5000;
  std::int64_t build_timeout_ms = 60000;
  std::optional<std::filesystem::path> catalog_path;
  std::optional<std::filesystem::path> fixtures_path;
  std::optional<std::string> validator_command;
  std::vector<std::string> comment_prefixes{"//", "#"};
  RegionStyle region_style = RegionStyle::braces;
  std::string prompt_comment = "//";
  /// Optional run-option overrides ("search", "provider", ...) applied
  /// between built-in defaults and command-line flags.
  nlohmann::json overrides = nlohmann::json::object();

  /// Reads `path`, or `path/subject.json` when `path` is a directory.
  static SubjectConfig load(const std::filesystem::path& path);
  static SubjectConfig from_json(const nlohmann::json& j, const std::filesystem::path& root);
};

/// One location per non-blank, non-comment line; lines whose round or
/// square brackets stay open are merged with the following lines.
std::vector<LineRange> segment_statements(std::string_view file_text,
                                          std::span<const std::string> comment_prefixes);

std::vector<StatementLocation> segment_file(const std::string& path, std::string_view file_text,
                                            std::span<const std::string> comment_prefixes);

LineRange find_enclosing_region(const std::vector<std::string>& lines, const StatementLocation& loc,
                                RegionStyle style);

/// Default validity rule: non-blank, with balanced (), [], {} and quotes.
bool validate_candidate(std::string_view text);

/// Applies the subject's external validator when configured, the default
/// rule otherwise. A crashing validator marks the candidate invalid.
class CandidateValidator {
 public:
  CandidateValidator() = default;
  explicit CandidateValidator(std::optional<std::string> command, std::filesystem::path cwd = {})
      : command_(std::move(command)), cwd_(std::move(cwd)) {}

  bool operator()(std::string_view text) const;

 private:
  std::optional<std::string> command_;
  std::filesystem::path cwd_;
};

/// Reads every file matching the source globs (relative to root).
SourceSnapshot load_sources(const SubjectConfig& cfg);

/// Writes the snapshot's files into workdir, creating directories.
void materialize(const SourceSnapshot& snapshot, const std::filesystem::path& workdir);

/// Explicit test ids, or every test when empty and `all` is set.
struct TestSelection {
  bool all = false;
  std::vector<std::string> ids;

  static TestSelection everything() { return {true, {}}; }
  static TestSelection of(std::vector<std::string> ids) { return {false, std::move(ids)}; }
};

class SubjectRunner {
 public:
  virtual ~SubjectRunner() = default;
  /// False when the build command fails; I/O problems throw.
  virtual bool build(const std::filesystem::path& workdir) = 0;
  virtual std::vector<TestReport> run_tests(const std::filesystem::path& workdir,
                                            const TestSelection& selection) = 0;
};

/// Runs the configured shell commands and parses the NDJSON protocol from
/// the test process's stdout. A test that produces no record within the
/// per-test timeout is killed and reported as timeout; the remaining
/// selected tests are re-launched. Tests still unreported when the process
/// exits are reported as crash.
class CommandRunner : public SubjectRunner {
 public:
  explicit CommandRunner(SubjectConfig cfg) : cfg_(std::move(cfg)) {}

  bool build(const std::filesystem::path& workdir) override;
  std::vector<TestReport> run_tests(const std::filesystem::path& workdir,
                                    const TestSelection& selection) override;

 private:
  SubjectConfig cfg_;
};

/// Result of running a shell command with an idle timeout.
struct ProcessResult {
  int exit_code = -1;        // valid when !signaled && !timed_out
  bool signaled = false;
  bool timed_out = false;
  bool not_found = false;    // shell reported 127
  std::string stderr_tail;
};

/// Runs `/bin/sh -c command` in cwd. Each complete stdout line goes to
/// on_line; the process group is killed when no line arrives for
/// idle_timeout_ms (no limit when <= 0). on_line returning false stops
/// the process early.
ProcessResult run_shell(const std::string& command, const std::filesystem::path& cwd,
                        std::int64_t idle_timeout_ms,
                        const std::function<bool(std::string_view)>& on_line,
                        std::string_view stdin_data = {});

/// Quotes a string for /bin/sh.
std::string shell_quote(std::string_view s);

}  // namespace evorepair
