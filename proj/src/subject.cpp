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

#include "evorepair/subject.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "evorepair/error.hpp"
#include "evorepair/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace evorepair {

// ---------------------------------------------------------------------------
// Configuration

SubjectConfig SubjectConfig::load(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "subject.json" : path;
  std::ifstream in(file);
  if (!in) fail(ErrorKind::config, "cannot open subject config " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::config, "subject config is not valid JSON: " + file.string());
  return from_json(j, fs::absolute(file).parent_path());
}

SubjectConfig SubjectConfig::from_json(const json& j, const fs::path& root) {
  if (!j.is_object()) fail(ErrorKind::config, "subject config must be a JSON object");
  SubjectConfig c;
  c.root = root.lexically_normal();
  c.id = j.value("id", std::string());
  if (c.id.empty()) {
    auto name = c.root.filename();
    if (name.empty()) name = c.root.parent_path().filename();
    c.id = name.string();
  }
  try {
    c.source_globs = j.value("sources", std::vector<std::string>{});
    if (j.contains("build_command") && !j["build_command"].is_null())
      c.build_command = j["build_command"].get<std::string>();
    c.test_command = j.value("test_command", std::string());
    c.per_test_timeout_ms = j.value("per_test_timeout_ms", c.per_test_timeout_ms);
    c.build_timeout_ms = j.value("build_timeout_ms", c.build_timeout_ms);
    if (j.contains("catalog")) c.catalog_path = c.root / j["catalog"].get<std::string>();
    if (j.contains("fixtures")) c.fixtures_path = c.root / j["fixtures"].get<std::string>();
    if (j.contains("validator_command")) c.validator_command = j["validator_command"].get<std::string>();
    if (j.contains("comment_prefixes")) c.comment_prefixes = j["comment_prefixes"].get<std::vector<std::string>>();
    const std::string style = j.value("region_style", std::string("braces"));
    if (style == "braces")
      c.region_style = RegionStyle::braces;
    else if (style == "indent")
      c.region_style = RegionStyle::indent;
    else
      fail(ErrorKind::config, "unknown region_style '" + style + "'");
    c.prompt_comment = j.value("prompt_comment", c.prompt_comment);
    if (j.contains("options")) c.overrides = j["options"];
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("subject config: ") + e.what());
  }
  if (c.test_command.empty()) fail(ErrorKind::config, "subject config lacks test_command");
  if (c.per_test_timeout_ms <= 0) fail(ErrorKind::config, "per_test_timeout_ms must be positive");
  if (c.source_globs.empty()) fail(ErrorKind::config, "subject config lacks source globs");
  return c;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::string_view trim_left(std::string_view s) {
  const auto n = s.find_first_not_of(" \t");
  return n == std::string_view::npos ? std::string_view() : s.substr(n);
}

std::size_t indent_of(std::string_view s) {
  const auto n = s.find_first_not_of(" \t");
  return n == std::string_view::npos ? s.size() : n;
}

bool starts_with_any(std::string_view s, std::span<const std::string> prefixes) {
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return !p.empty() && s.starts_with(p); });
}

/// Net change in (), [] depth over one line, ignoring string literals and a
/// trailing comment.
int bracket_delta(std::string_view line, std::span<const std::string> comment_prefixes) {
  int delta = 0;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      continue;
    }
    if (starts_with_any(line.substr(i), comment_prefixes)) break;
    if (c == '(' || c == '[') ++delta;
    if (c == ')' || c == ']') --delta;
  }
  return delta;
}

}  // namespace

std::vector<LineRange> segment_statements(std::string_view file_text,
                                          std::span<const std::string> comment_prefixes) {
  const std::vector<std::string> lines = split_lines(file_text);
  std::vector<LineRange> out;
  int depth = 0;
  int start = 0;      // 0: no open statement
  int last_code = 0;  // last line with code in the open statement
  for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
    const std::string_view line = lines[i];
    const bool code = !is_blank(line) && !starts_with_any(trim_left(line), comment_prefixes);
    if (!code) continue;
    if (start == 0) start = i + 1;
    last_code = i + 1;
    depth = std::max(0, depth + bracket_delta(line, comment_prefixes));
    if (depth == 0) {
      out.push_back({start, last_code});
      start = 0;
    }
  }
  if (start != 0) out.push_back({start, last_code});
  return out;
}

std::vector<StatementLocation> segment_file(const std::string& path, std::string_view file_text,
                                            std::span<const std::string> comment_prefixes) {
  std::vector<StatementLocation> out;
  for (const LineRange& r : segment_statements(file_text, comment_prefixes))
    out.push_back({path, r.start, r.end});
  return out;
}

namespace {

LineRange indent_region(const std::vector<std::string>& lines, const StatementLocation& loc) {
  const int n = static_cast<int>(lines.size());
  std::size_t bound = indent_of(lines[loc.line_start - 1]);
  int header = 0;
  for (int i = loc.line_start - 1; i >= 1 && bound > 0; --i) {
    const std::string& l = lines[i - 1];
    if (is_blank(l)) continue;
    const std::size_t ind = indent_of(l);
    if (ind >= bound) continue;
    bound = ind;
    const std::string_view t = trim_left(l);
    if (t.starts_with("def ") || t.starts_with("async def ")) {
      header = i;
      break;
    }
  }
  if (header == 0) {
    // The statement may itself be a function header.
    const std::string_view t = trim_left(lines[loc.line_start - 1]);
    if (t.starts_with("def ") || t.starts_with("async def ")) header = loc.line_start;
  }
  if (header == 0) return {1, n};
  const std::size_t header_indent = indent_of(lines[header - 1]);
  int end = loc.line_end;
  for (int i = loc.line_end + 1; i <= n; ++i) {
    const std::string& l = lines[i - 1];
    if (is_blank(l)) continue;
    if (indent_of(l) <= header_indent) break;
    end = i;
  }
  return {header, end};
}

bool looks_like_function_header(std::string_view text) {
  const std::string_view t = trim_left(text);
  if (t.find('(') == std::string_view::npos) return false;
  static const char* const kControl[] = {"if",    "for",   "while", "switch",       "else", "do",
                                         "try",   "catch", "synchronized", "return", "foreach"};
  std::size_t word_end = 0;
  while (word_end < t.size() && (std::isalnum(static_cast<unsigned char>(t[word_end])) || t[word_end] == '_'))
    ++word_end;
  const std::string_view word = t.substr(0, word_end);
  for (const char* k : kControl)
    if (word == k) return false;
  if (t.starts_with("}")) return false;
  return true;
}

LineRange brace_region(const std::vector<std::string>& lines, const StatementLocation& loc) {
  const int n = static_cast<int>(lines.size());
  struct Block {
    int open;
    int close;
  };
  std::vector<Block> blocks;
  std::vector<int> stack;
  for (int i = 1; i <= n; ++i) {
    const std::string& l = lines[i - 1];
    char quote = 0;
    for (std::size_t k = 0; k < l.size(); ++k) {
      const char c = l[k];
      if (quote) {
        if (c == '\\') ++k;
        else if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      else if (c == '/' && k + 1 < l.size() && l[k + 1] == '/') break;
      else if (c == '{') stack.push_back(i);
      else if (c == '}' && !stack.empty()) {
        blocks.push_back({stack.back(), i});
        stack.pop_back();
      }
    }
  }
  // Innermost first.
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return a.close - a.open < b.close - b.open;
  });
  for (const Block& b : blocks) {
    if (b.open > loc.line_start || b.close < loc.line_end) continue;
    int header = b.open;
    std::string_view head = lines[b.open - 1];
    if (trim_left(head).starts_with("{")) {
      for (int h = b.open - 1; h >= 1; --h)
        if (!is_blank(lines[h - 1])) {
          header = h;
          head = lines[h - 1];
          break;
        }
    }
    if (looks_like_function_header(head)) return {header, b.close};
  }
  return {1, n};
}

}  // namespace

LineRange find_enclosing_region(const std::vector<std::string>& lines, const StatementLocation& loc,
                                RegionStyle style) {
  require(loc.line_start >= 1 && loc.line_end <= static_cast<int>(lines.size()) &&
              loc.line_start <= loc.line_end,
          "statement " + loc.key() + " outside the file");
  return style == RegionStyle::indent ? indent_region(lines, loc) : brace_region(lines, loc);
}

// ---------------------------------------------------------------------------
// Candidate validity

bool validate_candidate(std::string_view text) {
  if (is_blank(text)) return false;
  std::vector<char> stack;
  char quote = 0;
  bool line_comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (line_comment) {
      if (c == '\n') line_comment = false;
      continue;
    }
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      else if (c == '\n') return false;  // string literal left open at end of line
      continue;
    }
    switch (c) {
      case '"':
      case '\'':
        quote = c;
        break;
      case '#':
        line_comment = true;
        break;
      case '/':
        if (i + 1 < text.size() && text[i + 1] == '/') line_comment = true;
        break;
      case '(': stack.push_back(')'); break;
      case '[': stack.push_back(']'); break;
      case '{': stack.push_back('}'); break;
      case ')':
      case ']':
      case '}':
        if (stack.empty() || stack.back() != c) return false;
        stack.pop_back();
        break;
      default:
        break;
    }
  }
  return quote == 0 && stack.empty();
}

bool CandidateValidator::operator()(std::string_view text) const {
  if (!command_) return validate_candidate(text);
  const ProcessResult r =
      run_shell(*command_, cwd_.empty() ? fs::current_path() : cwd_, 10000,
                [](std::string_view) { return true; }, text);
  return !r.signaled && !r.timed_out && r.exit_code == 0;
}

// ---------------------------------------------------------------------------
// Sources

SourceSnapshot load_sources(const SubjectConfig& cfg) {
  if (!fs::is_directory(cfg.root)) fail(ErrorKind::io, "subject root is not a directory: " + cfg.root.string());
  std::map<std::string, std::string> files;
  for (auto it = fs::recursive_directory_iterator(cfg.root); it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    const std::string rel = fs::relative(it->path(), cfg.root).generic_string();
    const bool match = std::any_of(cfg.source_globs.begin(), cfg.source_globs.end(), [&](const std::string& g) {
      return ::fnmatch(g.c_str(), rel.c_str(), 0) == 0;
    });
    if (!match) continue;
    std::ifstream in(it->path(), std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read source file " + rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    files.emplace(rel, ss.str());
  }
  if (files.empty()) fail(ErrorKind::config, "no source files match the subject's globs");
  return SourceSnapshot(std::move(files));
}

void materialize(const SourceSnapshot& snapshot, const fs::path& workdir) {
  for (const auto& [rel, text] : snapshot.files()) {
    const fs::path p = workdir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + p.string());
    out << text;
    if (!out) fail(ErrorKind::io, "short write to " + p.string());
  }
}

// ---------------------------------------------------------------------------
// Processes

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  out += "'";
  return out;
}

namespace {

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) fail(ErrorKind::io, std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0) ::close(fd[0]);
    fd[0] = -1;
  }
  void close_write() {
    if (fd[1] >= 0) ::close(fd[1]);
    fd[1] = -1;
  }
};

}  // namespace

ProcessResult run_shell(const std::string& command, const fs::path& cwd, std::int64_t idle_timeout_ms,
                        const std::function<bool(std::string_view)>& on_line, std::string_view stdin_data) {
  ignore_sigpipe_once();
  Pipe in, out, err;
  const std::string dir = cwd.string();
  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorKind::io, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in.fd[0], STDIN_FILENO);
    ::dup2(out.fd[1], STDOUT_FILENO);
    ::dup2(err.fd[1], STDERR_FILENO);
    if (::chdir(dir.c_str()) != 0) ::_exit(126);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  in.close_read();
  out.close_write();
  err.close_write();

  std::size_t written = 0;
  if (stdin_data.empty()) in.close_write();
  else ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

  ProcessResult result;
  std::string buffer;
  bool stop = false;
  bool out_open = true, err_open = true;
  using clock = std::chrono::steady_clock;
  auto last_line = clock::now();
  char chunk[8192];

  while ((out_open || err_open) && !stop) {
    pollfd fds[3];
    int nfds = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out_open) { fds[nfds] = {out.fd[0], POLLIN, 0}; out_idx = nfds++; }
    if (err_open) { fds[nfds] = {err.fd[0], POLLIN, 0}; err_idx = nfds++; }
    if (in.fd[1] >= 0) { fds[nfds] = {in.fd[1], POLLOUT, 0}; in_idx = nfds++; }
    int wait_ms = -1;
    if (idle_timeout_ms > 0) {
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - last_line).count();
      wait_ms = static_cast<int>(std::max<std::int64_t>(0, idle_timeout_ms - elapsed));
    }
    const int rc = ::poll(fds, nfds, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::io, std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) {
      result.timed_out = true;
      break;
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(in.fd[1], stdin_data.data() + written, stdin_data.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN) written = stdin_data.size();
      if (written >= stdin_data.size()) in.close_write();
    }
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
      const ssize_t n = ::read(out.fd[0], chunk, sizeof chunk);
      if (n <= 0) {
        out_open = false;
      } else {
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (!stop && (pos = buffer.find('\n')) != std::string::npos) {
          std::string line = buffer.substr(0, pos);
          buffer.erase(0, pos + 1);
          last_line = clock::now();
          if (!on_line(line)) stop = true;
        }
      }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
      const ssize_t n = ::read(err.fd[0], chunk, sizeof chunk);
      if (n <= 0) {
        err_open = false;
      } else {
        result.stderr_tail.append(chunk, static_cast<std::size_t>(n));
        if (result.stderr_tail.size() > 4096) result.stderr_tail.erase(0, result.stderr_tail.size() - 4096);
      }
    }
  }
  if (!stop && !result.timed_out && !buffer.empty()) on_line(buffer);
  if (stop || result.timed_out) ::kill(-pid, SIGKILL);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
    result.not_found = result.exit_code == 127;
  } else if (WIFSIGNALED(status)) {
    result.signaled = !result.timed_out && !stop;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Build and test execution

bool CommandRunner::build(const fs::path& workdir) {
  if (!cfg_.build_command) return true;
  const ProcessResult r =
      run_shell(*cfg_.build_command, workdir, cfg_.build_timeout_ms, [](std::string_view) { return true; });
  if (r.not_found) fail(ErrorKind::config, "build command not found: " + *cfg_.build_command);
  return !r.timed_out && !r.signaled && r.exit_code == 0;
}

namespace {

std::string substitute_selection(const std::string& command, const std::string& arg) {
  const std::string placeholder = "{tests}";
  const auto pos = command.find(placeholder);
  if (pos == std::string::npos) return command + " " + arg;
  std::string out = command;
  out.replace(pos, placeholder.size(), arg);
  return out;
}

TestReport synthetic(const std::string& id, Verdict v) {
  TestReport r;
  r.test_id = id;
  r.verdict = v;
  return r;
}

}  // namespace

std::vector<TestReport> CommandRunner::run_tests(const fs::path& workdir, const TestSelection& selection) {
  std::vector<std::string> pending = selection.ids;
  std::unordered_map<std::string, TestReport> received;
  std::vector<std::string> arrival;  // for selection == all
  bool any_output = false;

  while (selection.all || !pending.empty()) {
    std::string arg = "all";
    if (!selection.all) {
      arg.clear();
      for (std::size_t i = 0; i < pending.size(); ++i) arg += (i ? "," : "") + pending[i];
    }
    const std::set<std::string> wanted(pending.begin(), pending.end());
    std::optional<std::string> protocol_error;
    const ProcessResult r = run_shell(
        substitute_selection(cfg_.test_command, shell_quote(arg)), workdir, cfg_.per_test_timeout_ms,
        [&](std::string_view line) {
          if (is_blank(line)) return true;
          any_output = true;
          TestReport rep;
          try {
            rep = parse_report_line(line);
          } catch (const Error& e) {
            protocol_error = e.what();
            return false;
          }
          if (!selection.all && !wanted.count(rep.test_id)) return true;
          if (received.count(rep.test_id)) return true;
          arrival.push_back(rep.test_id);
          received.emplace(rep.test_id, std::move(rep));
          return true;
        });
    if (protocol_error) fail(ErrorKind::protocol, *protocol_error);
    if (r.not_found && !any_output)
      fail(ErrorKind::config, "test command not found: " + cfg_.test_command);
    if (selection.all) {
      if (r.timed_out)
        fail(ErrorKind::evaluation, "full test run exceeded the per-test timeout before reporting every test");
      break;
    }
    std::vector<std::string> rest;
    for (const auto& id : pending)
      if (!received.count(id)) rest.push_back(id);
    if (rest.empty()) break;
    if (r.timed_out) {
      received.emplace(rest.front(), synthetic(rest.front(), Verdict::timeout));
      pending.assign(rest.begin() + 1, rest.end());
      continue;
    }
    for (const auto& id : rest) received.emplace(id, synthetic(id, Verdict::crash));
    break;
  }

  std::vector<TestReport> out;
  const std::vector<std::string>& order = selection.all ? arrival : selection.ids;
  for (const auto& id : order) {
    auto it = received.find(id);
    if (it != received.end()) out.push_back(it->second);
  }
  return out;
}

}  // namespace evorepair
