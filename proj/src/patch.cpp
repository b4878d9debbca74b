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

#include "evorepair/patch.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "evorepair/error.hpp"

namespace evorepair {

const char* to_string(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::remove: return "delete";
    case EditKind::replace: return "replace";
    case EditKind::insert_before: return "insert_before";
  }
  return "delete";
}

void PatchGenome::swap_at(PatchGenome& other, std::size_t j) {
  std::swap(enabled[j], other.enabled[j]);
  std::swap(operation[j], other.operation[j]);
  std::swap(replace_pick[j], other.replace_pick[j]);
  std::swap(insert_pick[j], other.insert_pick[j]);
}

bool genome_fits(const PatchGenome& g, std::span<const SuspiciousStatement> lbs) {
  if (!g.consistent() || g.size() != lbs.size()) return false;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto op = static_cast<int>(g.operation[j]);
    if (op < 1 || op > 3 || g.enabled[j] > 1) return false;
    const auto r = std::max<std::size_t>(1, lbs[j].replacement_candidates.size());
    const auto i = std::max<std::size_t>(1, lbs[j].insertion_candidates.size());
    if (g.replace_pick[j] >= r || g.insert_pick[j] >= i) return false;
  }
  return true;
}

std::vector<Edit> decode_genome(const PatchGenome& g, std::span<const SuspiciousStatement> lbs) {
  require(g.consistent() && g.size() == lbs.size(),
          "genome length " + std::to_string(g.size()) + " does not match " +
              std::to_string(lbs.size()) + " likely-buggy statements");
  std::vector<Edit> edits;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!g.enabled[j]) continue;
    const SuspiciousStatement& s = lbs[j];
    switch (g.operation[j]) {
      case EditKind::remove:
        edits.push_back({s.location, EditKind::remove, {}});
        break;
      case EditKind::replace:
        if (s.replacement_candidates.empty()) break;  // inert
        require(g.replace_pick[j] < s.replacement_candidates.size(), "replacement index out of range");
        edits.push_back({s.location, EditKind::replace, s.replacement_candidates[g.replace_pick[j]].text});
        break;
      case EditKind::insert_before:
        if (s.insertion_candidates.empty()) break;
        require(g.insert_pick[j] < s.insertion_candidates.size(), "insertion index out of range");
        edits.push_back({s.location, EditKind::insert_before, s.insertion_candidates[g.insert_pick[j]].text});
        break;
      default:
        fail(ErrorKind::contract, "operation gene outside {1,2,3}");
    }
  }
  return edits;
}

std::string edit_key(std::span<const Edit> edits) {
  std::vector<const Edit*> order;
  for (const Edit& e : edits) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Edit* a, const Edit* b) {
    if (a->location != b->location) return a->location < b->location;
    return a->kind < b->kind;
  });
  std::string key;
  for (const Edit* e : order) {
    key += e->location.key();
    key += '\x1f';
    key += to_string(e->kind);
    key += '\x1f';
    key += e->text;
    key += '\x1e';
  }
  return key;
}

const std::string& SourceSnapshot::text(const std::string& path) const {
  auto it = files_.find(path);
  if (it == files_.end()) fail(ErrorKind::io, "source file not in snapshot: " + path);
  return it->second;
}

std::uint64_t SourceSnapshot::compute_fingerprint(const std::map<std::string, std::string>& files) {
  // FNV-1a over (path, NUL, length, text) for each file in path order.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [path, text] : files) {
    for (char c : path) mix(static_cast<unsigned char>(c));
    mix(0);
    std::uint64_t n = text.size();
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(n >> (8 * i)));
    for (char c : text) mix(static_cast<unsigned char>(c));
  }
  return h;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

namespace {

std::string leading_whitespace(const std::string& line) {
  const auto n = line.find_first_not_of(" \t");
  return n == std::string::npos ? line : line.substr(0, n);
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::vector<std::string> reindent(const std::string& text, const std::string& indent) {
  std::vector<std::string> lines = split_lines(text);
  std::size_t common = std::string::npos;
  for (const auto& l : lines)
    if (!blank(l)) common = std::min(common, leading_whitespace(l).size());
  if (common == std::string::npos) common = 0;
  for (auto& l : lines) l = blank(l) ? std::string() : indent + l.substr(common);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || trailing_newline) out += '\n';
  }
  return out;
}

}  // namespace

SourceSnapshot apply_edits(const SourceSnapshot& snapshot, std::span<const Edit> edits) {
  if (edits.empty()) return snapshot;
  std::map<std::string, std::vector<const Edit*>> by_file;
  for (const Edit& e : edits) {
    require(e.kind == EditKind::remove || !e.text.empty(),
            "replace/insert edit at " + e.location.key() + " carries no text");
    by_file[e.location.file].push_back(&e);
  }
  std::map<std::string, std::string> files = snapshot.files();
  for (auto& [path, list] : by_file) {
    auto it = files.find(path);
    if (it == files.end()) fail(ErrorKind::io, "edit targets a file outside the snapshot: " + path);
    std::sort(list.begin(), list.end(), [](const Edit* a, const Edit* b) {
      return a->location.line_start > b->location.line_start;
    });
    for (std::size_t i = 1; i < list.size(); ++i)
      require(!list[i]->location.overlaps(list[i - 1]->location),
              "overlapping edits at " + list[i]->location.key() + " and " + list[i - 1]->location.key());
    const bool trailing = it->second.empty() || it->second.back() == '\n';
    std::vector<std::string> lines = split_lines(it->second);
    for (const Edit* e : list) {
      const auto& loc = e->location;
      if (loc.line_start < 1 || loc.line_end < loc.line_start ||
          loc.line_end > static_cast<int>(lines.size()))
        fail(ErrorKind::domain, "edit lines " + std::to_string(loc.line_start) + "-" +
                                    std::to_string(loc.line_end) + " outside " + path + " (" +
                                    std::to_string(lines.size()) + " lines)");
      const auto first = lines.begin() + (loc.line_start - 1);
      const auto last = lines.begin() + loc.line_end;
      const std::string indent = leading_whitespace(*first);
      switch (e->kind) {
        case EditKind::remove:
          lines.erase(first, last);
          break;
        case EditKind::replace: {
          auto body = reindent(e->text, indent);
          auto at = lines.erase(first, last);
          lines.insert(at, body.begin(), body.end());
          break;
        }
        case EditKind::insert_before: {
          auto body = reindent(e->text, indent);
          lines.insert(first, body.begin(), body.end());
          break;
        }
      }
    }
    it->second = join_lines(lines, trailing);
  }
  return SourceSnapshot(std::move(files));
}

// ---------------------------------------------------------------------------
// Unified diff

namespace {

constexpr int kContext = 3;

/// Lines with their terminator kept, so a missing final newline compares
/// unequal to a present one.
std::vector<std::string_view> terminated_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    out.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

enum class Op : std::uint8_t { equal, remove, insert };

/// Myers O(ND) shortest edit script after trimming the common prefix and
/// suffix.
std::vector<Op> diff_ops(const std::vector<std::string_view>& a, const std::vector<std::string_view>& b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;
  const int n = static_cast<int>(a.size() - prefix - suffix);
  const int m = static_cast<int>(b.size() - prefix - suffix);
  auto A = [&](int i) { return a[prefix + i]; };
  auto B = [&](int i) { return b[prefix + i]; };

  std::vector<Op> middle;
  if (n == 0 || m == 0) {
    middle.assign(n, Op::remove);
    middle.insert(middle.end(), m, Op::insert);
  } else {
    const int max = n + m;
    const int offset = max + 1;
    std::vector<int> v(2 * max + 3, 0);
    std::vector<std::vector<int>> trace;
    int found_d = -1;
    for (int d = 0; d <= max && found_d < 0; ++d) {
      trace.push_back(v);
      for (int k = -d; k <= d; k += 2) {
        int x = (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) ? v[offset + k + 1]
                                                                              : v[offset + k - 1] + 1;
        int y = x - k;
        while (x < n && y < m && A(x) == B(y)) ++x, ++y;
        v[offset + k] = x;
        if (x >= n && y >= m) {
          found_d = d;
          break;
        }
      }
    }
    int x = n, y = m;
    for (int d = found_d; d >= 0; --d) {
      const auto& vd = trace[d];
      const int k = x - y;
      const int prev_k =
          (k == -d || (k != d && vd[offset + k - 1] < vd[offset + k + 1])) ? k + 1 : k - 1;
      const int prev_x = vd[offset + prev_k];
      const int prev_y = prev_x - prev_k;
      while (x > prev_x && y > prev_y) {
        middle.push_back(Op::equal);
        --x, --y;
      }
      if (d > 0) middle.push_back(x == prev_x ? Op::insert : Op::remove);
      x = prev_x;
      y = prev_y;
    }
    std::reverse(middle.begin(), middle.end());
  }
  std::vector<Op> ops(prefix, Op::equal);
  ops.insert(ops.end(), middle.begin(), middle.end());
  ops.insert(ops.end(), suffix, Op::equal);
  return ops;
}

void emit_line(std::string& out, char tag, std::string_view line) {
  out += tag;
  out += line;
  if (line.empty() || line.back() != '\n') out += "\n\\ No newline at end of file\n";
}

std::string range_text(std::size_t begin, std::size_t count) {
  const std::size_t start = count == 0 ? begin : begin + 1;
  if (count == 1) return std::to_string(start);
  return std::to_string(start) + "," + std::to_string(count);
}

void diff_file(std::string& out, const std::string& path, const std::string* before,
               const std::string* after) {
  const auto a = terminated_lines(before ? *before : std::string_view());
  const auto b = terminated_lines(after ? *after : std::string_view());
  const std::vector<Op> ops = diff_ops(a, b);

  std::vector<std::size_t> apos(ops.size() + 1), bpos(ops.size() + 1);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    apos[i + 1] = apos[i] + (ops[i] != Op::insert);
    bpos[i + 1] = bpos[i] + (ops[i] != Op::remove);
  }
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (ops[i] != Op::equal) changes.push_back(i);
  if (changes.empty()) return;

  out += before ? "--- a/" + path + "\n" : std::string("--- /dev/null\n");
  out += after ? "+++ b/" + path + "\n" : std::string("+++ /dev/null\n");

  std::size_t g = 0;
  while (g < changes.size()) {
    std::size_t h = g;
    while (h + 1 < changes.size() && changes[h + 1] - changes[h] - 1 <= 2 * kContext) ++h;
    const std::size_t lo = changes[g] >= kContext ? changes[g] - kContext : 0;
    const std::size_t hi = std::min(ops.size() - 1, changes[h] + kContext);
    const std::size_t acount = apos[hi + 1] - apos[lo];
    const std::size_t bcount = bpos[hi + 1] - bpos[lo];
    out += "@@ -" + range_text(apos[lo], acount) + " +" + range_text(bpos[lo], bcount) + " @@\n";
    for (std::size_t i = lo; i <= hi; ++i) {
      switch (ops[i]) {
        case Op::equal: emit_line(out, ' ', a[apos[i]]); break;
        case Op::remove: emit_line(out, '-', a[apos[i]]); break;
        case Op::insert: emit_line(out, '+', b[bpos[i]]); break;
      }
    }
    g = h + 1;
  }
}

}  // namespace

std::string render_diff(const SourceSnapshot& before, const SourceSnapshot& after) {
  std::string out;
  if (before.fingerprint() == after.fingerprint() && before == after) return out;
  std::vector<std::string> paths;
  for (const auto& [p, _] : before.files()) paths.push_back(p);
  for (const auto& [p, _] : after.files())
    if (!before.contains(p)) paths.push_back(p);
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const std::string* a = before.contains(p) ? &before.files().at(p) : nullptr;
    const std::string* b = after.contains(p) ? &after.files().at(p) : nullptr;
    if (a && b && *a == *b) continue;
    diff_file(out, p, a, b);
  }
  return out;
}

namespace {

struct Hunk {
  std::size_t old_start = 0;
  std::size_t old_count = 0;
  std::vector<std::pair<char, std::string>> lines;  // tag, terminated text
};

struct FileDiff {
  std::optional<std::string> old_path;  // nullopt for /dev/null
  std::optional<std::string> new_path;
  std::vector<Hunk> hunks;
};

std::optional<std::string> diff_path(std::string_view header) {
  std::string_view p = header.substr(4);
  if (auto tab = p.find('\t'); tab != std::string_view::npos) p = p.substr(0, tab);
  if (p == "/dev/null") return std::nullopt;
  if (p.starts_with("a/") || p.starts_with("b/")) p = p.substr(2);
  return std::string(p);
}

std::size_t parse_count(std::string_view s, std::string_view line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorKind::parse, "bad hunk header: " + std::string(line));
  return v;
}

std::pair<std::size_t, std::size_t> parse_range(std::string_view r, std::string_view line) {
  const auto comma = r.find(',');
  if (comma == std::string_view::npos) return {parse_count(r, line), 1};
  return {parse_count(r.substr(0, comma), line), parse_count(r.substr(comma + 1), line)};
}

std::vector<FileDiff> parse_diff(std::string_view diff) {
  std::vector<FileDiff> files;
  const auto lines = split_lines(diff);
  Hunk* hunk = nullptr;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.starts_with("--- ") && i + 1 < lines.size() && lines[i + 1].starts_with("+++ ")) {
      files.push_back({diff_path(line), diff_path(lines[i + 1]), {}});
      hunk = nullptr;
      ++i;
      continue;
    }
    if (line.starts_with("@@ ")) {
      if (files.empty()) fail(ErrorKind::parse, "hunk before file header: " + line);
      const auto close = line.find(" @@", 3);
      if (close == std::string::npos || line[3] != '-')
        fail(ErrorKind::parse, "bad hunk header: " + line);
      const std::string_view body(line.data() + 4, close - 4);
      const auto space = body.find(" +");
      if (space == std::string_view::npos) fail(ErrorKind::parse, "bad hunk header: " + line);
      auto [os, oc] = parse_range(body.substr(0, space), line);
      Hunk h;
      h.old_count = oc;
      h.old_start = oc == 0 ? os : os - 1;
      files.back().hunks.push_back(std::move(h));
      hunk = &files.back().hunks.back();
      continue;
    }
    if (!hunk) continue;  // preamble such as "diff --git" or "index" lines
    if (line.starts_with("\\")) {
      if (!hunk->lines.empty() && !hunk->lines.back().second.empty())
        hunk->lines.back().second.pop_back();
      continue;
    }
    const char tag = line.empty() ? ' ' : line[0];
    if (tag != ' ' && tag != '-' && tag != '+') {
      hunk = nullptr;
      continue;
    }
    hunk->lines.emplace_back(tag, (line.empty() ? std::string() : line.substr(1)) + "\n");
  }
  return files;
}

}  // namespace

SourceSnapshot apply_unified_diff(const SourceSnapshot& snapshot, std::string_view diff) {
  std::map<std::string, std::string> files = snapshot.files();
  for (const FileDiff& fd : parse_diff(diff)) {
    const std::string path = fd.old_path ? *fd.old_path : fd.new_path.value_or("");
    if (path.empty()) fail(ErrorKind::parse, "diff section without a path");
    std::string original;
    if (fd.old_path) {
      auto it = files.find(path);
      if (it == files.end()) fail(ErrorKind::io, "diff targets a file outside the snapshot: " + path);
      original = it->second;
    }
    const auto old_lines = terminated_lines(original);
    std::string result;
    std::size_t cursor = 0;
    int hunk_no = 0;
    for (const Hunk& h : fd.hunks) {
      ++hunk_no;
      if (h.old_start < cursor || h.old_start > old_lines.size())
        fail(ErrorKind::parse, "hunk " + std::to_string(hunk_no) + " of " + path + " is out of order or range");
      for (; cursor < h.old_start; ++cursor) result += old_lines[cursor];
      for (const auto& [tag, text] : h.lines) {
        if (tag == '+') {
          result += text;
          continue;
        }
        if (cursor >= old_lines.size() || old_lines[cursor] != text)
          fail(ErrorKind::parse, "hunk " + std::to_string(hunk_no) + " of " + path +
                                     " does not match at line " + std::to_string(cursor + 1));
        if (tag == ' ') result += text;
        ++cursor;
      }
    }
    for (; cursor < old_lines.size(); ++cursor) result += old_lines[cursor];
    if (!fd.new_path)
      files.erase(path);
    else
      files[*fd.new_path] = std::move(result);
  }
  return SourceSnapshot(std::move(files));
}

}  // namespace evorepair
