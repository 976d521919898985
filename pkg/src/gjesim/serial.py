"""Sequential Gauss-Jordan elimination with a shrinking active window."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import AugmentedMatrix, OpCounter, SingularMatrixError, as_array, check_solution, default_eps


@dataclass
class SolveOutcome:
    solution: np.ndarray
    swaps_performed: int
    counters: OpCounter
    matrix: Optional[np.ndarray] = None
    pivots: object = None
    worker_stats: Optional[list] = None

    @property
    def x(self) -> np.ndarray:
        return self.solution


def find_swap_row(A, i: int, bound: int, eps: float) -> Optional[int]:
    """Smallest ``j`` with ``i < j < bound`` and ``|A[j, i]| > eps``, else ``None``."""
    col = np.abs(np.asarray(A[i + 1:bound, i]))
    hits = np.flatnonzero(col > eps)
    if hits.size == 0:
        return None
    return i + 1 + int(hits[0])


def swap_rows(A, i: int, j: int, counters: OpCounter | None = None) -> None:
    # Columns left of the pivot are already zero in both rows.
    A[[i, j], i:] = A[[j, i], i:]
    if counters is not None:
        counters.swap()


def normalize_row(A, i: int, counters: OpCounter | None = None) -> None:
    n = A.shape[0]
    m = 1.0 / A[i, i]
    if m != 1.0:
        A[i, i + 1:] *= m
        A[i, i] = 1.0
        if counters is not None:
            counters.scale(n + 1 - i)


def eliminate(A, i: int, tail, rows, counters: OpCounter | None = None) -> None:
    """Apply ``R_j - a_ji * R_i`` to every row in ``rows`` whose multiplier is nonzero.

    ``tail`` is the normalized pivot row over columns ``i+1 .. n``. Each row
    sees the same per-element arithmetic whether it is updated alone or as
    part of a batch, which keeps serial and block-parallel results identical.
    """
    n = A.shape[0]
    f = np.asarray(A[rows, i])
    live = np.flatnonzero(f)
    if live.size == 0:
        return
    rows = rows[live]
    f = f[live]
    A[rows, i + 1:] -= np.multiply.outer(f, tail)
    A[rows, i] = 0.0
    if counters is not None:
        counters.add_rows(rows.size, n + 1 - i)


def iterate(A, i: int, counters: OpCounter | None = None) -> None:
    """One Gauss-Jordan step on pivot ``i``; touches columns ``i .. n`` only.

    The pivot must already be nonzero (swap beforehand).
    """
    n = A.shape[0]
    if A[i, i] == 0.0:
        raise ValueError(f"zero pivot at {i}; swap before iterating")
    normalize_row(A, i, counters)
    tail = np.array(A[i, i + 1:])
    others = np.concatenate((np.arange(0, i), np.arange(i + 1, n)))
    eliminate(A, i, tail, others, counters)


def run_pivots(A, start: int, stop: int, eps: float, counters: OpCounter) -> int:
    """Iterate pivots ``start .. stop-1`` with unrestricted swaps; returns swap count."""
    n = A.shape[0]
    swaps = 0
    for i in range(start, stop):
        if abs(A[i, i]) <= eps:
            j = find_swap_row(A, i, n, eps)
            if j is None:
                raise SingularMatrixError(i)
            swap_rows(A, i, j, counters)
            swaps += 1
        iterate(A, i, counters)
    return swaps


def gauss_jordan_serial(A, eps: float | None = None, *, start: int = 0) -> SolveOutcome:
    """Solve ``[A | b]`` by sequential Gauss-Jordan elimination on a working copy.

    ``start`` skips pivots whose columns are already identity columns (used
    after a partial reduction). On return ``outcome.matrix`` is in reduced
    row-echelon form and its last column equals ``outcome.solution``.
    """
    work = np.array(as_array(A), dtype=np.float64, copy=True)
    AugmentedMatrix(work)  # shape and finiteness validation
    if eps is None:
        eps = default_eps(work)
    n = work.shape[0]
    counters = OpCounter()
    swaps = run_pivots(work, start, n, eps, counters)
    x = check_solution(work[:, n].copy())
    return SolveOutcome(x, swaps, counters.snapshot(), matrix=work)
