import time

import pytest

SUITE_BUDGET_S = 60.0

_results: dict[str, list] = {}
_start = [0.0]


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")
    _start[0] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        entry = _results.setdefault(number, [title, True])
        entry[1] = entry[1] and report.passed


def _suite_elapsed():
    return time.perf_counter() - _start[0]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results, key=int):
        title, passed = _results[number]
        tr.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title}")
    elapsed = _suite_elapsed()
    ok = elapsed < SUITE_BUDGET_S
    tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion 8 (runtime): full suite "
                  f"{elapsed:.1f} s < {SUITE_BUDGET_S:.0f} s")


def pytest_sessionfinish(session, exitstatus):
    if _results and _suite_elapsed() >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
