"""Row-block parallel Gauss-Jordan elimination.

Each of ``p`` workers owns a contiguous block of rows ``[ds, de)`` and runs
three phases: pre-diagonal (consume pivots published by lower blocks),
diagonal (produce its own pivots, eliminating below and back-substituting
above within the block) and post-diagonal (consume pivots of higher blocks).
Pivot rows travel only through a :class:`~gjesim.core.PivotMatrix`.

When a diagonal pivot vanishes and no lower row of the same block can
replace it, the worker borrows a row from a higher block: every worker
posts, after applying pivot ``i``, which of its rows are nonzero in column
``i+1``. The donor is parked waiting for pivot ``i+1`` at that point, so the
requester can exchange row contents with the donor slot before publishing.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (AugmentedMatrix, OpCounter, PivotMatrix, SingularMatrixError, WaitAborted,
                   as_array, check_solution, default_eps)
from .serial import SolveOutcome, eliminate, find_swap_row, normalize_row, swap_rows

THREADS_ENV = "GJESIM_THREADS"


def resolve_threads(p: int | None) -> int:
    """Explicit ``p`` wins; otherwise ``$GJESIM_THREADS``; otherwise 1."""
    if p is not None:
        return int(p)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


@dataclass(frozen=True)
class PartitionPlan:
    n: int
    p: int
    starts: tuple
    ends: tuple

    @property
    def sizes(self) -> list:
        return [e - s for s, e in zip(self.starts, self.ends)]

    def bounds(self, rank: int) -> tuple:
        return self.starts[rank], self.ends[rank]

    def owner(self, row: int) -> int:
        for r, e in enumerate(self.ends):
            if row < e:
                return r
        raise IndexError(row)


def make_partition(n: int, p: int) -> PartitionPlan:
    """Contiguous blocks; the first ``n mod p`` blocks get one extra row."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= p <= n:
        raise ValueError(f"worker count must satisfy 1 <= p <= n, got p={p}, n={n}")
    base, extra = divmod(n, p)
    starts, ends = [], []
    s = 0
    for r in range(p):
        e = s + base + (1 if r < extra else 0)
        starts.append(s)
        ends.append(e)
        s = e
    return PartitionPlan(n, p, tuple(starts), tuple(ends))


class PivotCandidateBoard:
    """Per-row progress marks plus per-(worker, column) candidate postings.

    ``post(rank, col, rows)`` is written once per pair, after the worker has
    applied pivot ``col - 1`` to all of its rows; ``rows`` lists the owned
    rows whose entry in ``col`` is usable as a pivot.
    """

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.progress = np.full(n, -1, dtype=np.int64)
        self._posts: dict = {}
        self._cond = threading.Condition()

    def mark(self, rows, col: int) -> None:
        self.progress[rows] = col

    def post(self, rank: int, col: int, rows) -> None:
        with self._cond:
            key = (rank, col)
            assert key not in self._posts, f"candidate board {key} posted twice"
            self._posts[key] = np.asarray(rows, dtype=np.int64)
            self._cond.notify_all()

    def flagged(self, rank: int, col: int):
        with self._cond:
            return self._posts.get((rank, col))

    def wait_for(self, rank: int, col: int, abort: threading.Event) -> np.ndarray:
        with self._cond:
            while (rank, col) not in self._posts:
                if abort.is_set():
                    raise WaitAborted(f"aborted while waiting for candidates of worker {rank}, column {col}")
                self._cond.wait(0.005)
            return self._posts[(rank, col)]


@dataclass
class WorkerStats:
    rank: int
    rows: tuple
    counters: OpCounter = field(default_factory=OpCounter)
    swaps: int = 0
    pre_ns: int = 0
    diag_ns: int = 0
    post_ns: int = 0
    wait_ns: int = 0


class _Shared:
    def __init__(self, A, plan, pivots, board, eps, start):
        self.A = A
        self.plan = plan
        self.pivots = pivots
        self.board = board
        self.eps = eps
        self.start = start
        self.abort = threading.Event()
        self.errors: list = []


def acquire_diagonal_pivot(shared: _Shared, rank: int, j: int, stats: WorkerStats | None = None) -> None:
    """Make ``A[j, j]`` usable, swapping locally first and across blocks second."""
    A, eps = shared.A, shared.eps
    if abs(A[j, j]) > eps:
        return
    ds, de = shared.plan.bounds(rank)
    k = find_swap_row(A, j, de, eps)
    if k is None:
        for donor in range(rank + 1, shared.plan.p):
            t0 = time.perf_counter_ns()
            rows = shared.board.wait_for(donor, j, shared.abort)
            if stats is not None:
                stats.wait_ns += time.perf_counter_ns() - t0
            if rows.size:
                k = int(rows[0])
                break
    if k is None:
        raise SingularMatrixError(j)
    swap_rows(A, j, k, stats.counters if stats is not None else None)
    if stats is not None:
        stats.swaps += 1


def _worker(shared: _Shared, rank: int, stats: WorkerStats) -> None:
    A, n, pivots, board = shared.A, shared.A.shape[0], shared.pivots, shared.board
    ds, de = shared.plan.bounds(rank)
    start = shared.start
    block = np.arange(ds, de)
    counters = stats.counters

    def wait(i):
        t0 = time.perf_counter_ns()
        tail = pivots.wait(i, shared.abort)
        stats.wait_ns += time.perf_counter_ns() - t0
        return tail

    t0 = time.perf_counter_ns()
    for i in range(start, max(ds, start)):
        tail = wait(i)
        eliminate(A, i, tail, block, counters)
        board.mark(block, i)
        if i + 1 < n:
            col = np.abs(A[ds:de, i + 1])
            board.post(rank, i + 1, ds + np.flatnonzero(col > shared.eps))
    t1 = time.perf_counter_ns()
    stats.pre_ns = t1 - t0

    for i in range(max(ds, start), de):
        if i == start:
            tail = pivots.read(i)
        else:
            acquire_diagonal_pivot(shared, rank, i, stats)
            normalize_row(A, i, counters)
            tail = np.array(A[i, i + 1:])
            pivots.publish(i, tail)
        others = block[block != i]
        eliminate(A, i, tail, others, counters)
        board.mark(block, i)
    t2 = time.perf_counter_ns()
    stats.diag_ns = t2 - t1

    for i in range(max(de, start), n):
        tail = wait(i)
        eliminate(A, i, tail, block, counters)
        board.mark(block, i)
    stats.post_ns = time.perf_counter_ns() - t2


def gauss_jordan_parallel(A, p: int | None = None, eps: float | None = None, *, start: int = 0,
                          diagnostics: bool = False) -> SolveOutcome:
    """Solve ``[A | b]`` with ``p`` cooperating worker threads.

    With ``start > 0`` only pivots ``start .. n-1`` are processed; rows above
    ``start`` still receive the back-substitution updates.
    """
    work = np.array(as_array(A), dtype=np.float64, copy=True)
    AugmentedMatrix(work)
    n = work.shape[0]
    p = resolve_threads(p)
    plan = make_partition(n, p)
    if eps is None:
        eps = default_eps(work)
    pivots = PivotMatrix(n)
    board = PivotCandidateBoard(n, p)
    prologue = OpCounter()
    swaps = 0

    if start < n:
        if abs(work[start, start]) <= eps:
            j = find_swap_row(work, start, n, eps)
            if j is None:
                raise SingularMatrixError(start)
            swap_rows(work, start, j, prologue)
            swaps += 1
        normalize_row(work, start, prologue)
        pivots.publish(start, work[start, start + 1:])

    shared = _Shared(work, plan, pivots, board, eps, start)
    stats = [WorkerStats(r, plan.bounds(r)) for r in range(p)]

    def run(rank):
        try:
            _worker(shared, rank, stats[rank])
        except WaitAborted:
            pass
        except BaseException as exc:  # noqa: BLE001 - reported by the orchestrator
            shared.errors.append((rank, exc))
            shared.abort.set()

    if p == 1:
        run(0)
    else:
        threads = [threading.Thread(target=run, args=(r,), name=f"gje-worker-{r}") for r in range(p)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    if shared.errors:
        for rank, exc in shared.errors:
            if isinstance(exc, SingularMatrixError):
                raise SingularMatrixError(exc.pivot) from exc
        rank, exc = shared.errors[0]
        raise RuntimeError(f"parallel solve aborted: worker {rank} failed with {exc!r}") from exc

    counters = prologue.snapshot()
    for s in stats:
        counters.merge(s.counters)
        swaps += s.swaps
    x = check_solution(work[:, n].copy())
    return SolveOutcome(x, swaps, counters, matrix=work, pivots=pivots,
                        worker_stats=stats if diagnostics else None)
