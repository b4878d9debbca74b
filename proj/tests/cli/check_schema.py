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


"""Validates report.json files against docs/report.schema.json.

    python3 tests/cli/check_schema.py SCHEMA REPORT...
"""

import json
import sys

import jsonschema


def main():
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    with open(sys.argv[1]) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in sys.argv[2:]:
        with open(path) as f:
            report = json.load(f)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors:
            print("%s: %s at /%s" % (path, e.message, "/".join(str(p) for p in e.path)))
        bad += bool(errors)
    print("%d report(s) checked, %d invalid" % (len(sys.argv) - 2, bad))
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
