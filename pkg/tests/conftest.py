import pathlib

import pytest

from qwalk import load_graph

GOLDEN = pathlib.Path(__file__).parent / "golden"

_criteria: dict[int, dict] = {}


@pytest.fixture
def graph16():
    return load_graph((GOLDEN / "graph16.json").read_text())


@pytest.fixture
def digraph8():
    return load_graph((GOLDEN / "digraph8.json").read_text())


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for number, text in getattr(report, "criteria", ()):
        entry = _criteria.setdefault(number, {"text": text, "passed": True, "tests": 0})
        entry["tests"] += 1
        entry["passed"] &= report.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = [tuple(m.args) for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {entry['text']} ({entry['tests']} tests)")
