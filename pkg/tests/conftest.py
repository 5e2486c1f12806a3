"""Shared fixtures and the acceptance summary printed after the run."""

import time

import pytest

_CRITERIA = {}
_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = (m.args[0], m.args[1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    t0 = time.perf_counter()
    yield
    item.user_properties.append(("wall_s", time.perf_counter() - t0))


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        wall = dict(report.user_properties).get("wall_s", report.duration)
        _RESULTS[report.nodeid] = (report.outcome, wall)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for nodeid, (num, title) in sorted(_CRITERIA.items(), key=lambda kv: kv[1][0]):
        outcome, wall = _RESULTS.get(nodeid, ("not run", 0.0))
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        tr.write_line(f"criterion {num:2d} {status:4s} {title} ({wall:.2f} s)")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240611)
