# The command line interface
#
# Every command reads JSON inputs and writes one JSON (or CSV) report to
# stdout. Here the CLI is driven in-process through ``main``.

import io
import json
import os
import tempfile

from frameport.cli import main


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


with tempfile.TemporaryDirectory() as tmp:
    half = os.path.join(tmp, "half.json")
    with open(half, "w") as fh:
        json.dump({"dim": 2, "atoms": [[1, 0], [0, 1]], "weights": [0.5, 0.5]}, fh)

    code, text = call("frame-report", "--input", half)
    print(code, json.loads(text)["result"])

    code, text = call("frame-report", "--input", half, "--format", "csv")
    print(text)

code, text = call("delta-dual", "--a", "1", "--lam", "2")
print(code, json.loads(text)["result"]["measure"])

code, text = call("delta-dual", "--a", "2", "--lam", "0.1")
print(code, text)
