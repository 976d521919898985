"""Repeated timed solves, Tukey outlier removal and table-shaped reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .generators import FAMILIES, GenSpec, generate
from .reduction import finish_solve, reduce_system

log = logging.getLogger(__name__)

PRESET_SIZES = (128, 512, 1024, 2040)
CSV_FIELDS = ("family", "n", "threads", "reduction_fraction", "reps", "kept", "removed", "mean_ns",
              "median_ns", "stddev_ns", "min_ns", "max_ns", "speedup_vs_1t")


@dataclass
class BenchConfig:
    families: tuple = FAMILIES
    sizes: tuple = PRESET_SIZES
    threads: tuple = (1, 2, 4, 8)
    reductions: tuple = (0.0, 0.19, 0.5)
    reps: int = 200
    warmup: int = 10
    seed: int = 2024
    dt: float = 0.001

    def validate(self) -> None:
        if self.reps < 3:
            raise ValueError("reps must be >= 3 for quartile-based outlier removal")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if any(t < 1 for t in self.threads):
            raise ValueError("thread counts must be >= 1")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValueError(f"unknown family {fam!r}")


@dataclass
class BenchRow:
    family: str
    n: int
    threads: int
    reduction_fraction: float
    reps: int
    kept: int = 0
    removed: int = 0
    mean_ns: float = math.nan
    median_ns: float = math.nan
    stddev_ns: float = math.nan
    min_ns: float = math.nan
    max_ns: float = math.nan
    speedup_vs_1t: float = math.nan
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(r.failed for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow([_cell(getattr(r, f)) for f in CSV_FIELDS])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(d):
            return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}
        return json.dumps([clean(asdict(r)) for r in self.rows], indent=2)


def _cell(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _quartiles(samples):
    q1, _, q3 = statistics.quantiles(samples, n=4, method="inclusive")
    return q1, q3


def remove_outliers(samples) -> list:
    """Drop samples outside the Tukey fences ``[Q1 - 1.5 IQR, Q3 + 1.5 IQR]``; order kept."""
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    q1, q3 = _quartiles(samples)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return [s for s in samples if lo <= s <= hi]


def summarize(samples) -> tuple:
    """``(mean, median, stddev, min, max)``; stddev uses the ``n-1`` denominator."""
    samples = list(samples)
    if not samples:
        raise ValueError("cannot summarize an empty sample")
    sd = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return (statistics.fmean(samples), statistics.median(samples), sd, min(samples), max(samples))


def run_benchmark(cfg: BenchConfig, clock: Callable[[], int] = time.perf_counter_ns,
                  progress: Callable[[BenchRow], None] | None = None) -> BenchReport:
    """Time the per-step work (injection + finishing solve) for every grid cell.

    Inputs are generated, and reduced, once per (family, n, fraction) and
    outside the timed region. ``threads == 1`` uses the sequential kernel.
    """
    cfg.validate()
    report = BenchReport()
    for family in cfg.families:
        for n in cfg.sizes:
            for frac in cfg.reductions:
                cells = [BenchRow(family, n, p, float(frac), cfg.reps) for p in cfg.threads]
                try:
                    system = generate(GenSpec(n, cfg.seed, family, reduction_fraction=frac))
                    red = reduce_system(system)
                except Exception as exc:  # noqa: BLE001 - recorded per cell
                    for c in cells:
                        c.error = f"setup failed: {exc!r}"
                    log.warning("setup failed for %s n=%d f=%s: %r", family, n, frac, exc)
                    report.rows.extend(cells)
                    continue
                for cell in cells:
                    _run_cell(cell, red, cfg, clock)
                    if progress is not None:
                        progress(cell)
                _fill_speedups(cells)
                report.rows.extend(cells)
    return report


def _run_cell(cell: BenchRow, red, cfg: BenchConfig, clock) -> None:
    p = cell.threads
    if p > red.n:
        cell.error = f"threads={p} exceeds n={red.n}"
        return
    mode = "serial" if p == 1 else "parallel"
    samples = []
    try:
        for k in range(cfg.warmup):
            finish_solve(red, k * cfg.dt, mode, p)
        for k in range(cfg.reps):
            t = k * cfg.dt
            start = clock()
            finish_solve(red, t, mode, p)
            samples.append(clock() - start)
    except Exception as exc:  # noqa: BLE001 - recorded per cell
        cell.error = f"solve failed: {exc!r}"
        log.warning("cell %s n=%d p=%d f=%s failed: %r", cell.family, cell.n, p, cell.reduction_fraction, exc)
        return
    kept = remove_outliers(samples)
    cell.kept = len(kept)
    cell.removed = len(samples) - len(kept)
    cell.mean_ns, cell.median_ns, cell.stddev_ns, cell.min_ns, cell.max_ns = (float(v) for v in summarize(kept))


def _fill_speedups(cells) -> None:
    base = next((c for c in cells if c.threads == 1 and not c.failed), None)
    if base is None:
        return
    for c in cells:
        if not c.failed and c.mean_ns > 0:
            c.speedup_vs_1t = base.mean_ns / c.mean_ns
