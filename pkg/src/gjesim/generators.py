"""Seeded benchmark inputs: dense random systems and sparse resistive ladders.

All randomness comes from SplitMix64 (Steele, Lea & Flood) in counter form:
output ``k`` of seed ``s`` is ``mix(s + (k + 1) * 0x9E3779B97F4A7C15)`` and a
double in ``[0, 1)`` is ``(z >> 11) * 2**-53``. Draws are consumed in a fixed
order, so a spec gives identical bytes on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import AugmentedMatrix, TimeFunction, TimeVaryingSystem, VariableEntry, inject_variables
from .oracle import oracle_solve, residual_ratio
from .reduction import compute_boundary

FAMILIES = ("random-dense", "circuit-sparse")

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class GenerationError(RuntimeError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        self.counter = 0

    def next_u64(self, count: int) -> np.ndarray:
        k = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            z = self.seed + k * _GAMMA
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))

    def random(self, count: int) -> np.ndarray:
        return (self.next_u64(count) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def uniform(self, low: float, high: float, count: int) -> np.ndarray:
        return low + (high - low) * self.random(count)


@dataclass(frozen=True)
class GenSpec:
    """``reduction_fraction`` is the requested boundary as a share of ``n``.

    ``None`` plants no variable entries at all. ``var_fraction`` adds that
    share of the eligible positions past the boundary as further variables.
    """

    n: int
    seed: int = 0
    family: str = "random-dense"
    reduction_fraction: Optional[float] = None
    var_fraction: float = 0.0

    def target_boundary(self) -> Optional[int]:
        if self.reduction_fraction is None:
            return None
        if not 0.0 <= self.reduction_fraction <= 1.0:
            raise ValueError("reduction_fraction must lie in [0, 1]")
        return int(math.floor(self.reduction_fraction * self.n + 0.5))


def generate(spec: GenSpec) -> TimeVaryingSystem:
    if spec.family == "random-dense":
        return gen_random_dense(spec)
    if spec.family == "circuit-sparse":
        return gen_circuit_sparse(spec)
    raise ValueError(f"unknown family {spec.family!r}; expected one of {FAMILIES}")


def _pick(rng: SplitMix64, items: list, fraction: float) -> list:
    count = int(math.floor(fraction * len(items) + 0.5))
    if count <= 0:
        return []
    order = np.argsort(rng.random(len(items)), kind="stable")
    return [items[i] for i in sorted(order[:count])]


def gen_random_dense(spec: GenSpec) -> TimeVaryingSystem:
    """Entries uniform in [-10, 10]; diagonals ``|u| + 10 n`` make rows strictly dominant."""
    n = spec.n
    if n < 1:
        raise ValueError("n must be positive")
    rng = SplitMix64(spec.seed)
    data = rng.uniform(-10.0, 10.0, n * (n + 1)).reshape(n, n + 1)
    idx = np.arange(n)
    data[idx, idx] = np.abs(data[idx, idx]) + 10.0 * n

    variables = []
    beta = spec.target_boundary()
    if beta is not None and beta < n:
        diag = [beta] + _pick(rng, list(range(beta + 1, n)), spec.var_fraction)
        params = rng.random(2 * len(diag))
        for k, pos in enumerate(diag):
            freq = 0.5 + 2.0 * params[2 * k]
            phase = 2.0 * math.pi * params[2 * k + 1]
            variables.append(VariableEntry(pos, pos, TimeFunction.sinusoid(5.0, 5.0, freq, phase)))
    return TimeVaryingSystem(AugmentedMatrix(data), variables)


# --- circuit ladder -----------------------------------------------------------------------------

def _ladder_layout(n: int):
    """Row layout of an ``n``-branch ladder.

    Branch 0 is the source; node ``k`` feeds shunt ``2k-1`` and series
    ``2k`` into node ``k+1``; the last node ends in one (even ``n``) or two
    (odd ``n``) shunts. Returns ``kcl`` (row -> branch signs), ``loops``
    (row -> branch signs) and ``elements`` (branch -> [(row, sign)]) for the
    resistances.
    """
    m = n // 2
    odd = n % 2 == 1
    kcl_rows = {}
    for k in range(1, m + 1):
        row = 0 if k == 1 else 2 * k - 1
        signs = {2 * k - 2: 1.0, 2 * k - 1: -1.0}
        if k < m or odd:
            signs[2 * k] = -1.0
        kcl_rows[row] = signs
    loop_rows = {1: {0: 1.0, 1: 1.0}}
    last_loop = m if odd else m - 1
    for k in range(1, last_loop + 1):
        signs = {2 * k - 1: -1.0, 2 * k: 1.0}
        if 2 * k + 1 < n and not (odd and k == m):
            signs[2 * k + 1] = 1.0
        loop_rows[2 * k] = signs
    elements: dict = {}
    for row, signs in loop_rows.items():
        for branch, sign in signs.items():
            elements.setdefault(branch, []).append((row, sign))
    return kcl_rows, loop_rows, elements


def _plan_variables(n: int, elements: dict, beta: int):
    """Choose a row order and a resistor whose occurrences put the boundary at ``beta``."""
    arrangements = [None]
    if beta + 1 < n:
        arrangements.append((beta, beta + 1))
    if beta >= 1:
        arrangements.append((beta - 1, beta))
    for swap in arrangements:
        perm = list(range(n))
        if swap:
            a, b = swap
            perm[a], perm[b] = perm[b], perm[a]
        where = {old: new for new, old in enumerate(perm)}
        for branch in sorted(elements):
            occ = [(where[row], branch) for row, _ in elements[branch]]
            if min(min(r, c) for r, c in occ) == beta:
                return perm, branch, where
    raise GenerationError(f"no ladder resistor realizes boundary {beta} for n={n}")


def _build_ladder(n: int, rng: SplitMix64):
    kcl_rows, loop_rows, elements = _ladder_layout(n)
    resist = rng.uniform(10.0, 10000.0, n)
    emf = rng.uniform(1.0, 24.0, n)
    has_emf = rng.random(n) < 0.25
    data = np.zeros((n, n + 1))
    for row, signs in kcl_rows.items():
        for branch, sign in signs.items():
            data[row, branch] = sign
    for row, signs in loop_rows.items():
        for branch, sign in signs.items():
            data[row, branch] = sign * resist[branch]
    data[1, n] = emf[0]
    for row, signs in loop_rows.items():
        series = [b for b, s in signs.items() if b % 2 == 0 and b > 0 and s > 0 and len(elements[b]) == 1]
        if row != 1 and series and has_emf[series[0]]:
            data[row, n] += emf[series[0]]
    return data, resist, elements


def gen_circuit_sparse(spec: GenSpec, max_retries: int = 8) -> TimeVaryingSystem:
    """KCL/KVL system of a seeded resistive ladder with ``n`` branch currents.

    Resistances lie in [10, 10000] ohm and EMFs in [1, 24] V. Variable
    entries are whole sinusoidal resistors (the constant part at their
    positions is zero) chosen so the boundary matches the requested one.
    """
    n = spec.n
    if n < 3:
        raise ValueError("circuit family needs n >= 3")
    beta = spec.target_boundary()
    last_error = None
    for attempt in range(max_retries + 1):
        seed = (spec.seed + attempt * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        rng = SplitMix64(seed)
        data, resist, elements = _build_ladder(n, rng)
        variables = []
        labels = [f"I{k}" for k in range(n)]
        if beta is not None and beta < n:
            perm, first, where = _plan_variables(n, elements, beta)
            data = data[perm]
            chosen = [first]
            eligible = [b for b in sorted(elements) if b != first
                        and all(where[r] >= beta for r, _ in elements[b]) and b >= beta]
            chosen += _pick(rng, eligible, spec.var_fraction)
            params = rng.random(2 * len(chosen))
            for k, branch in enumerate(sorted(chosen)):
                freq = 0.5 + 2.0 * params[2 * k]
                phase = 2.0 * math.pi * params[2 * k + 1]
                for row, sign in elements[branch]:
                    r = where[row]
                    data[r, branch] = 0.0
                    R = sign * resist[branch]
                    variables.append(VariableEntry(r, branch, TimeFunction.sinusoid(R, 0.5 * R, freq, phase)))
            variables.sort(key=lambda v: (v.row, v.col))
        system = TimeVaryingSystem(AugmentedMatrix(data), variables, labels)
        try:
            for t in (0.0, 0.25):
                A = inject_variables(system, t)
                x = oracle_solve(A)
                if residual_ratio(A, x) > 1e-10:
                    raise GenerationError(f"oracle residual too large at t={t}")
        except (ArithmeticError, GenerationError) as exc:
            last_error = exc
            continue
        if beta is not None and compute_boundary(system) != min(beta, n):
            raise GenerationError(f"planted boundary {compute_boundary(system)} != requested {beta}")
        return system
    raise GenerationError(f"no nonsingular ladder after {max_retries + 1} attempts: {last_error}")
