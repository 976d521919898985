"""Gauss-Jordan solvers for iteratively simulated circuits.

Sequential and row-block parallel elimination, partial reduction of systems
with time-varying entries, a time-stepping driver, seeded input generators
and a benchmark harness.
"""

from .core import (AugmentedMatrix, InjectionError, OpCounter, PivotMatrix, SingularMatrixError, TimeFunction,
                   TimeVaryingSystem, VariableEntry, default_eps, inject_variables, pivot_capacity)
from .generators import GenSpec, SplitMix64, gen_circuit_sparse, gen_random_dense, generate
from .oracle import oracle_solve
from .parallel import PartitionPlan, PivotCandidateBoard, gauss_jordan_parallel, make_partition
from .reduction import (ReductionResult, SymbolicEntry, compute_boundary, finish_solve, gauss_jordan_partial,
                        reduce_system, symbolic_reduce_check)
from .serial import SolveOutcome, find_swap_row, gauss_jordan_serial, iterate
from .simulation import SimulationConfig, TimeSeries, example_circuit_fig1, simulate

__version__ = "0.1.0"
