"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each."""

import pytest

_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    label, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _results[label] = (text, "PASS" if rep.passed else "FAIL")


def _sort_key(label):
    digits = "".join(c for c in label if c.isdigit())
    return int(digits), label


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_results, key=_sort_key):
        text, status = _results[label]
        terminalreporter.write_line(f"{status}  criterion {label:<3} {text}")
