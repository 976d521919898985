"""Time-stepping driver and the three-branch example circuit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AugmentedMatrix, SingularMatrixError, TimeFunction, TimeVaryingSystem, VariableEntry, inject_variables
from .parallel import gauss_jordan_parallel
from .reduction import finish_solve, reduce_system
from .serial import gauss_jordan_serial

MODES = ("full-serial", "full-parallel", "reduced-serial", "reduced-parallel")


class SimulationError(RuntimeError):
    def __init__(self, step: int, t: float, cause: Exception):
        self.step = step
        self.t = t
        super().__init__(f"step {step} (t={t!r}) failed: {cause}")


@dataclass
class SimulationConfig:
    t0: float = 0.0
    dt: float = 0.1
    steps: int = 1
    mode: str = "full-serial"
    threads: int = 1
    eps: float | None = None

    def validate(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class TimeSeries:
    times: np.ndarray
    states: list = field(default_factory=list)
    counters: list = field(default_factory=list)

    def as_array(self) -> np.ndarray:
        return np.vstack(self.states)


def example_circuit_fig1() -> TimeVaryingSystem:
    """Three branches: source (600 ohm, 12 V), 900 ohm shunt and R2(t) = 900(1 + sin(pi t))."""
    base = AugmentedMatrix([[1.0, -1.0, -1.0, 0.0],
                            [600.0, 900.0, 0.0, 12.0],
                            [0.0, -900.0, 0.0, 0.0]])
    r2 = VariableEntry(2, 2, TimeFunction.sinusoid(offset=900.0, amplitude=900.0, frequency=0.5, phase=0.0))
    return TimeVaryingSystem(base, [r2], unknown_labels=["I0", "I1", "I2"])


def simulate(system: TimeVaryingSystem, cfg: SimulationConfig) -> TimeSeries:
    cfg.validate()
    times = cfg.t0 + np.arange(cfg.steps) * cfg.dt
    series = TimeSeries(times)
    reduced = None
    if cfg.mode.startswith("reduced"):
        reduced = reduce_system(system, cfg.eps)
    parallel = cfg.mode.endswith("parallel")

    for step, t in enumerate(times):
        t = float(t)
        try:
            if reduced is not None:
                out = finish_solve(reduced, t, "parallel" if parallel else "serial", cfg.threads, cfg.eps)
            else:
                A = inject_variables(system, t)
                out = gauss_jordan_parallel(A, cfg.threads, cfg.eps) if parallel else gauss_jordan_serial(A, cfg.eps)
        except (SingularMatrixError, ArithmeticError, ValueError) as exc:
            raise SimulationError(step, t, exc) from exc
        series.states.append(out.solution)
        series.counters.append(out.counters)
    return series
