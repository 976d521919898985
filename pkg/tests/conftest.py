import numpy as np
import pytest

from gjesim import example_circuit_fig1

FIG1_X = np.array([1 / 100, 1 / 150, 1 / 300])


def max_rel_err(x, ref):
    """Componentwise relative error; absolute where the reference is exactly zero."""
    x, ref = np.asarray(x), np.asarray(ref)
    diff = np.abs(x - ref)
    scale = np.where(ref == 0.0, 1.0, np.abs(ref))
    return float(np.max(diff / scale))


class TrackedMatrix:
    """ndarray stand-in recording the lowest column index each access touches."""

    def __init__(self, data):
        self.data = data
        self.shape = data.shape
        self.min_col = None

    def _note(self, key):
        col = key[1] if isinstance(key, tuple) else 0
        if isinstance(col, slice):
            col = col.start or 0
        col = int(col)
        self.min_col = col if self.min_col is None else min(self.min_col, col)

    def __getitem__(self, key):
        self._note(key)
        return self.data[key]

    def __setitem__(self, key, value):
        self._note(key)
        self.data[key] = value


@pytest.fixture
def fig1():
    return example_circuit_fig1()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
