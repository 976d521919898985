"""Partial reduction of time-varying systems ahead of the time loop.

Pivots ``0 .. beta-1`` never touch a row or column carrying a variable
entry, so they can be eliminated once on the constant part. Each time step
then injects the variable terms and finishes pivots ``beta .. n-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (AugmentedMatrix, OpCounter, TimeVaryingSystem, as_array, default_eps,
                   inject_variables)
from .parallel import gauss_jordan_parallel
from .serial import SolveOutcome, find_swap_row, gauss_jordan_serial, iterate, swap_rows


@dataclass
class ReductionResult:
    reduced: AugmentedMatrix
    beta: int
    completed: int
    variables: list
    counters: OpCounter = field(default_factory=OpCounter)
    unknown_labels: Optional[list] = None

    @property
    def n(self) -> int:
        return self.reduced.n

    @property
    def remaining(self) -> int:
        return self.n - self.completed

    def as_system(self) -> TimeVaryingSystem:
        return TimeVaryingSystem(self.reduced, list(self.variables), self.unknown_labels)


def compute_boundary(system: TimeVaryingSystem) -> int:
    """``min(first variable column, first variable row)``; ``n`` without variables."""
    if not system.variables:
        return system.n
    first_col = min(v.col for v in system.variables)
    first_row = min(v.row for v in system.variables)
    return min(first_col, first_row)


def gauss_jordan_partial(A, beta: int, eps: float, counters: OpCounter | None = None) -> int:
    """Run pivots ``0 .. beta-1`` in place, swapping only among rows below ``beta``.

    Returns the number of completed pivots; stops early (leaving the matrix
    after the completed pivots) when a pivot is zero and no legal swap exists.
    """
    n = A.shape[0]
    if not 0 <= beta <= n:
        raise ValueError(f"boundary must lie in [0, {n}], got {beta}")
    for i in range(beta):
        if abs(A[i, i]) <= eps:
            j = find_swap_row(A, i, beta, eps)
            if j is None:
                return i
            swap_rows(A, i, j, counters)
        iterate(A, i, counters)
    return beta


def reduce_system(system: TimeVaryingSystem, eps: float | None = None,
                  beta: int | None = None) -> ReductionResult:
    beta = compute_boundary(system) if beta is None else beta
    work = system.base.data.copy()
    if eps is None:
        eps = default_eps(work)
    counters = OpCounter()
    completed = gauss_jordan_partial(work, beta, eps, counters)
    return ReductionResult(AugmentedMatrix(work), beta, completed, list(system.variables),
                           counters, system.unknown_labels)


def finish_solve(red: ReductionResult, t: float, mode: str = "serial", p: int | None = None,
                 eps: float | None = None) -> SolveOutcome:
    """Inject the variables at time ``t`` and finish the remaining pivots.

    ``mode`` is ``"serial"`` or ``"parallel"`` (with ``p`` workers). The
    stored reduced matrix is never modified.
    """
    injected = inject_variables(TimeVaryingSystem(red.reduced, red.variables), t)
    if mode == "serial":
        return gauss_jordan_serial(injected, eps, start=red.completed)
    if mode == "parallel":
        return gauss_jordan_parallel(injected, p, eps, start=red.completed)
    raise ValueError(f"unknown finishing mode {mode!r}")


# --- symbolic replay ---------------------------------------------------------------------------

@dataclass
class SymbolicEntry:
    """``constant + sum(coeff * v_id)`` for variable identities ``v_id``."""

    constant: float
    var_terms: dict = field(default_factory=dict)

    @property
    def is_constant(self) -> bool:
        return not self.var_terms

    def is_zero(self) -> bool:
        return self.constant == 0.0 and not self.var_terms

    def scaled(self, m: float) -> "SymbolicEntry":
        return SymbolicEntry(self.constant * m, {k: c * m for k, c in self.var_terms.items()})

    def minus_multiple(self, factor: float, other: "SymbolicEntry") -> "SymbolicEntry":
        terms = dict(self.var_terms)
        for k, c in other.var_terms.items():
            terms[k] = terms.get(k, 0.0) - factor * c
        return SymbolicEntry(self.constant - factor * other.constant, terms)

    def __str__(self):
        parts = [repr(self.constant)] + [f"{c!r}*v{k}" for k, c in sorted(self.var_terms.items())]
        return " + ".join(parts)


@dataclass
class SymbolicVerdict:
    valid: bool
    completed: int
    matrix: list
    violation: Optional[str] = None
    rule: Optional[str] = None
    operation: Optional[tuple] = None

    def __bool__(self):
        return self.valid


def _symbolic_matrix(system: TimeVaryingSystem) -> list:
    base = system.base.data
    M = [[SymbolicEntry(float(v)) for v in row] for row in base]
    for k, v in enumerate(system.variables):
        M[v.row][v.col].var_terms[k] = 1.0
    return M


def _row_has_vars(row) -> bool:
    return any(e.var_terms for e in row)


def _criteria_violation(M, system: TimeVaryingSystem) -> Optional[str]:
    home = {k: (v.row, v.col) for k, v in enumerate(system.variables)}
    for r, row in enumerate(M):
        for c, e in enumerate(row):
            for k, coeff in e.var_terms.items():
                if home[k] != (r, c):
                    return f"variable {k} introduced at ({r}, {c})"
    for k, (r, c) in home.items():
        if M[r][c].var_terms.get(k) != 1.0:
            return f"variable {k} at ({r}, {c}) no longer has coefficient 1"
    return None


def symbolic_reduce_check(system: TimeVaryingSystem, beta: int, eps: float = 0.0) -> SymbolicVerdict:
    """Replay the partial reduction on symbolic entries and validate every step.

    A scaled pivot row may hold no variable term; a row addition needs a
    variable-free pivot row and multiplier; a swap may not involve a row
    with variable terms. After every applied step the whole matrix is also
    re-checked: each variable keeps coefficient 1 at its own position and
    appears nowhere else.
    """
    n = system.n
    if n > 64:
        raise ValueError("symbolic replay is a test facility limited to n <= 64")
    M = _symbolic_matrix(system)

    def fail(i, rule, message, op):
        return SymbolicVerdict(False, i, M, message, rule, op)

    for i in range(min(beta, n)):
        pivot = M[i][i]
        if pivot.is_constant and abs(pivot.constant) <= eps:
            j = next((j for j in range(i + 1, min(beta, n))
                      if not M[j][i].is_zero() and (M[j][i].var_terms or abs(M[j][i].constant) > eps)), None)
            if j is None:
                return SymbolicVerdict(True, i, M)
            if _row_has_vars(M[i]) or _row_has_vars(M[j]):
                return fail(i, "3.16", f"swap of rows {i} and {j} moves a variable term", ("swap", i, j))
            M[i], M[j] = M[j], M[i]
            pivot = M[i][i]

        if pivot.var_terms:
            return fail(i, "3.13", f"pivot ({i}, {i}) carries a variable term", ("scale", i))
        m = 1.0 / pivot.constant
        if m != 1.0:
            if _row_has_vars(M[i]):
                return fail(i, "3.13", f"scaling row {i} would rescale its variable term", ("scale", i))
            M[i] = [e.scaled(m) for e in M[i]]
            M[i][i] = SymbolicEntry(1.0)

        for k in range(n):
            if k == i or M[k][i].is_zero():
                continue
            if _row_has_vars(M[i]):
                return fail(i, "3.15", f"pivot row {i} carries a variable term added into row {k}", ("add", k, i))
            if M[k][i].var_terms:
                return fail(i, "3.15", f"multiplier ({k}, {i}) carries a variable term", ("add", k, i))
            factor = M[k][i].constant
            M[k] = [M[k][c].minus_multiple(factor, M[i][c]) if c >= i else M[k][c] for c in range(n + 1)]
            M[k][i] = SymbolicEntry(0.0)

        broken = _criteria_violation(M, system)
        if broken:
            return fail(i, "criteria", broken, ("iteration", i))
    return SymbolicVerdict(True, min(beta, n), M)
