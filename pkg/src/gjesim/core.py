"""Augmented matrices, time-varying entries, the pivot store and op counters."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class SingularMatrixError(ArithmeticError):
    """No usable pivot at ``pivot`` (all candidates within tolerance of zero)."""

    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(message or f"matrix is singular within tolerance at pivot {pivot}")


class InjectionError(ValueError):
    pass


class AugmentedMatrix:
    """Dense row-major ``n x (n+1)`` system ``[A | b]`` of float64.

    The constructor always copies, so the caller's buffer is never aliased.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] != arr.shape[0] + 1:
            raise ValueError(f"augmented matrix must be n x (n+1), got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("augmented matrix contains non-finite entries")
        self.data = arr

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def coefficients(self) -> np.ndarray:
        return self.data[:, :-1]

    @property
    def rhs(self) -> np.ndarray:
        return self.data[:, -1]

    def copy(self) -> "AugmentedMatrix":
        return AugmentedMatrix(self.data)

    def __eq__(self, other):
        if not isinstance(other, AugmentedMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and self.data.tobytes() == other.data.tobytes()

    def __repr__(self):
        return f"AugmentedMatrix(n={self.n})"


def as_array(A) -> np.ndarray:
    if isinstance(A, AugmentedMatrix):
        return A.data
    return np.asarray(A, dtype=np.float64)


def default_eps(A) -> float:
    """Pivot tolerance ``1e-12 * max(1, ||A||_inf)`` over the coefficient block."""
    arr = as_array(A)
    norm = float(np.max(np.sum(np.abs(arr[:, :-1]), axis=1))) if arr.size else 0.0
    return 1e-12 * max(1.0, norm)


@dataclass(frozen=True)
class TimeFunction:
    kind: str
    params: tuple

    @classmethod
    def constant(cls, value: float) -> "TimeFunction":
        return cls("const", (float(value),))

    @classmethod
    def sinusoid(cls, offset: float, amplitude: float, frequency: float, phase: float = 0.0) -> "TimeFunction":
        return cls("sin", (float(offset), float(amplitude), float(frequency), float(phase)))

    def __post_init__(self):
        expected = {"const": 1, "sin": 4}
        if self.kind not in expected:
            raise ValueError(f"unknown time function kind {self.kind!r}")
        if len(self.params) != expected[self.kind]:
            raise ValueError(f"{self.kind} takes {expected[self.kind]} parameters, got {len(self.params)}")

    def __call__(self, t: float) -> float:
        if self.kind == "const":
            return self.params[0]
        offset, amplitude, frequency, phase = self.params
        return offset + amplitude * math.sin(2.0 * math.pi * frequency * t + phase)


@dataclass(frozen=True)
class VariableEntry:
    row: int
    col: int
    func: TimeFunction


@dataclass
class TimeVaryingSystem:
    """Constant part ``base`` plus the entries re-evaluated at each time step."""

    base: AugmentedMatrix
    variables: list = field(default_factory=list)
    unknown_labels: Optional[list] = None

    def __post_init__(self):
        if not isinstance(self.base, AugmentedMatrix):
            self.base = AugmentedMatrix(self.base)
        n = self.base.n
        seen = set()
        for v in self.variables:
            if not (0 <= v.row < n and 0 <= v.col <= n):
                raise ValueError(f"variable entry ({v.row}, {v.col}) outside a {n}x{n + 1} system")
            if (v.row, v.col) in seen:
                raise ValueError(f"duplicate variable entry at ({v.row}, {v.col})")
            seen.add((v.row, v.col))
        if self.unknown_labels is not None and len(self.unknown_labels) != n:
            raise ValueError("unknown_labels must have one label per unknown")

    @property
    def n(self) -> int:
        return self.base.n


def inject_variables(system: TimeVaryingSystem, t: float) -> AugmentedMatrix:
    """Return a fresh matrix holding ``base + f(t)`` at every variable position."""
    out = system.base.data.copy()
    for v in system.variables:
        value = v.func(t)
        if not math.isfinite(value):
            raise InjectionError(f"variable entry ({v.row}, {v.col}) is non-finite at t={t!r}: {value!r}")
        out[v.row, v.col] += value
    return AugmentedMatrix(out)


def pivot_capacity(n: int) -> int:
    """Stored-element count of pivot rows ``0 .. n-2``: ``(n-1)(n+2)/2``."""
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1) * (n + 2) // 2


class PivotMatrix:
    """Publish-once, read-many store of normalized pivot-row tails.

    Row ``i`` holds augmented columns ``i+1 .. n`` (the leading 1 is implicit),
    so the final row keeps a single element, the normalized free term.
    Publication goes through a :class:`threading.Event`; setting it happens
    after the tail is stored, which gives readers that observe the flag a
    complete row.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self._rows: list = [None] * n
        self._ready = [threading.Event() for _ in range(n)]

    def publish(self, i: int, tail) -> None:
        tail = np.array(tail, dtype=np.float64, copy=True)
        assert not self._ready[i].is_set(), f"pivot row {i} published twice"
        assert tail.shape == (self.n - i,), f"pivot row {i} tail must have {self.n - i} entries"
        tail.setflags(write=False)
        self._rows[i] = tail
        self._ready[i].set()

    def is_ready(self, i: int) -> bool:
        self._check(i)
        return self._ready[i].is_set()

    def read(self, i: int):
        """Tail of row ``i``, or ``None`` while it is unpublished."""
        self._check(i)
        if not self._ready[i].is_set():
            return None
        return self._rows[i]

    def wait(self, i: int, abort: threading.Event | None = None, spin: int = 100,
             poll: float = 0.005) -> np.ndarray:
        """Block until row ``i`` is published; bounded spin, then sleep on the event."""
        self._check(i)
        ev = self._ready[i]
        for _ in range(spin):
            if ev.is_set():
                return self._rows[i]
        while not ev.wait(poll):
            if abort is not None and abort.is_set():
                raise WaitAborted(f"aborted while waiting for pivot row {i}")
        return self._rows[i]

    def stored_elements(self, upto: int | None = None) -> int:
        """Elements stored in published rows ``0 .. upto-1`` (default ``n-1``)."""
        upto = self.n - 1 if upto is None else upto
        return sum(len(r) for r in self._rows[:upto] if r is not None)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"pivot index {i} out of range for n={self.n}")


class WaitAborted(RuntimeError):
    pass


@dataclass
class OpCounter:
    element_updates: int = 0
    row_ops: int = 0

    def scale(self, width: int) -> None:
        self.element_updates += width
        self.row_ops += 1

    def add_rows(self, count: int, width: int) -> None:
        self.element_updates += count * width
        self.row_ops += count

    def swap(self) -> None:
        self.row_ops += 1

    def reset(self) -> None:
        self.element_updates = 0
        self.row_ops = 0

    def merge(self, other: "OpCounter") -> None:
        self.element_updates += other.element_updates
        self.row_ops += other.row_ops

    def snapshot(self) -> "OpCounter":
        return OpCounter(self.element_updates, self.row_ops)


def check_solution(x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ArithmeticError("solution contains non-finite values")
    return x
