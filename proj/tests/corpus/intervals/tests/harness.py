# Copyright 2026 The evorepair Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Test shim speaking the NDJSON report protocol. Usage:
#   python3 -S -B tests/harness.py all|id1,id2,...
# Runs the test_* functions of tests/test_*.py in the requested order and
# prints one JSON object per test on stdout. Line coverage of files under
# src/ is collected with sys.settrace. Deliberately free of imports beyond
# sys and os so startup stays cheap.

import os
import sys

ROOT = os.getcwd()
SRC = os.path.join(ROOT, "src") + os.sep
sys.path.insert(0, os.path.join(ROOT, "src"))
sys.path.insert(0, os.path.join(ROOT, "tests"))

OUT = sys.stdout
INF = float("inf")


def esc(s):
    out = ['"']
    for ch in str(s):
        if ch == '"' or ch == "\\":
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def num(x):
    if x != x or x == INF or x == -INF:
        return "null"
    return repr(float(x))


class Checker:
    """Soft assertions: every check is recorded, none raises."""

    def __init__(self):
        self.records = []

    def near(self, aid, expected, actual, delta=0.0):
        try:
            a = float(actual)
        except (TypeError, ValueError):
            a = float("nan")
        ok = a == a and abs(a - expected) <= delta
        self.records.append('{"id":%s,"kind":"numeric","expected":%s,"actual":%s,"delta":%s,"passed":%s}'
                            % (esc(aid), num(expected), num(a), num(delta), "true" if ok else "false"))

    def equal(self, aid, expected, actual):
        ok = expected == actual
        self.records.append('{"id":%s,"kind":"categorical","passed":%s}' % (esc(aid), "true" if ok else "false"))

    def passed(self):
        return all(r.endswith('"passed":true}') for r in self.records)


covered = set()


def _local(frame, event, arg):
    if event == "line":
        covered.add((frame.f_code.co_filename, frame.f_lineno))
    return _local


def _global(frame, event, arg):
    if frame.f_code.co_filename.startswith(SRC):
        return _local
    return None


def collect():
    tests = []
    for name in sorted(os.listdir(os.path.join(ROOT, "tests"))):
        if name.startswith("test_") and name.endswith(".py"):
            mod = __import__(name[:-3])
            for key, value in mod.__dict__.items():
                if key.startswith("test_") and callable(value):
                    tests.append((key, value))
    return tests


def main():
    wanted = sys.argv[1] if len(sys.argv) > 1 else "all"
    sys.stdout = sys.stderr  # subject output must not reach the report channel
    tests = collect()
    table = dict(tests)
    order = [t[0] for t in tests] if wanted == "all" else [t for t in wanted.split(",") if t]
    for tid in order:
        fn = table.get(tid)
        if fn is None:
            continue
        chk = Checker()
        covered.clear()
        verdict = "fail"
        sys.settrace(_global)
        try:
            fn(chk)
            verdict = "pass" if chk.passed() else "fail"
        except Exception as e:  # a raising test counts as crashed
            verdict = "crash"
            sys.stderr.write("%s: %s: %s\n" % (tid, type(e).__name__, e))
        finally:
            sys.settrace(None)
        cov = sorted("%s:%d-%d" % (os.path.relpath(f, ROOT), l, l) for f, l in covered)
        OUT.write('{"test":%s,"verdict":"%s","assertions":[%s],"covered":[%s]}\n'
                  % (esc(tid), verdict, ",".join(chk.records), ",".join(esc(c) for c in cov)))
        OUT.flush()


main()
