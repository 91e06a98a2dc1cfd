import numpy as np
import pytest

from locsolve.problems import default_seed, example_tridiagonal


@pytest.fixture
def gen():
    return np.random.default_rng(default_seed())


@pytest.fixture
def example():
    """(A, b, x_exact, x0) of the 9x9 tridiagonal reference system."""
    return example_tridiagonal()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by a test")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key = mark.args[0]
    results = item.config._criteria
    title, ok = results.get(key, (mark.args[1], True))
    # any failing phase (setup, call, teardown) fails the criterion
    if rep.failed or (rep.when == "call" and rep.skipped):
        ok = False
    results[key] = (title, ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        title, ok = results[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {title}")
