import numpy as np
import pytest

from ppfl.crypto import seeded_rng

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return seeded_rng(12345, 0)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


def random_updates(rng, n, dim, low=-1.0, high=1.0):
    return [rng.uniform(low, high, size=dim) for _ in range(n)]


@pytest.fixture
def make_updates():
    return random_updates


@pytest.fixture
def np_rng():
    return np.random.default_rng(2024)
