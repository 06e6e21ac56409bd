import numpy as np
import pytest

from twolevel.core import ModeSet, TimeGrid, TwoLevelParams

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Register one acceptance line: record_criterion(number, passed, detail)."""

    def _record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20021227)


@pytest.fixture
def resonant():
    """(params, modes, g) for a single mode on resonance with omega0 = 1."""
    g = 0.8
    return TwoLevelParams(1.0), ModeSet([1.0], [g]), g


@pytest.fixture
def short_grid():
    return TimeGrid(6.0, 3000)
