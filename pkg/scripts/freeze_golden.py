"""Regenerate the frozen golden files under tests/golden/.

Only rerun this when a change to the numerics is intended; the golden test
compares against these bytes exactly.

    python scripts/freeze_golden.py
"""

import contextlib
import io
import json
import pathlib
import sys

from qwalk.cli import main

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"


def run(argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    if code:
        sys.exit(f"command failed ({code}): {argv}")
    return buf.getvalue()


def table_argv(files):
    names = ",".join(f.removesuffix(".json") for f in files)
    return ["compare", *[str(GOLDEN / f) for f in files], "--names", names]


def report_argv(entry):
    graph, *rest = entry
    return ["score", "--graph", str(GOLDEN / graph), *rest]


def main_freeze():
    runs = json.loads((GOLDEN / "runs.json").read_text())
    for name, argv in runs["graphs"].items():
        (GOLDEN / name).write_text(run(argv))
    for name, entry in runs["reports"].items():
        (GOLDEN / name).write_text(run(report_argv(entry)))
    for name, files in runs["tables"].items():
        (GOLDEN / name).write_text(run(table_argv(files)))
    print(f"froze {sum(len(v) for k, v in runs.items())} files in {GOLDEN}")


if __name__ == "__main__":
    main_freeze()
