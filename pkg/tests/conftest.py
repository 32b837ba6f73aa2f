import numpy as np
import pytest

from ktflow.invariant_forms import BaseGrid


@pytest.fixture(scope="session")
def grid8():
    return BaseGrid(8)


@pytest.fixture(scope="session")
def grid16():
    return BaseGrid(16)


@pytest.fixture(scope="session")
def grid32():
    return BaseGrid(32)


@pytest.fixture()
def rng():
    return np.random.default_rng(11235)


_CRITERION_LINES = []


@pytest.fixture(scope="session")
def criterion():
    """Recorder for acceptance-criterion verdicts, echoed after the run."""
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _CRITERION_LINES.append(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus):
    if _CRITERION_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
