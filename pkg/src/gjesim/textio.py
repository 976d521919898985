"""Plain-text system format.

::

    n
    <n lines of n+1 decimals>
    VARS k                      (optional)
    row col const v
    row col sin offset amplitude frequency phase
    BETA b                      (optional trailer written by ``reduce``)

Numbers are written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

from pathlib import Path

from .core import AugmentedMatrix, TimeFunction, TimeVaryingSystem, VariableEntry


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps(system: TimeVaryingSystem, beta: int | None = None) -> str:
    lines = [str(system.n)]
    for row in system.base.data:
        lines.append(" ".join(_fmt(v) for v in row))
    if system.variables:
        lines.append(f"VARS {len(system.variables)}")
        for v in system.variables:
            lines.append(f"{v.row} {v.col} {v.func.kind} " + " ".join(_fmt(p) for p in v.func.params))
    if beta is not None:
        lines.append(f"BETA {beta}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple:
    """Parse the format; returns ``(system, beta_or_None)``."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty input")
    try:
        n = int(lines[0])
    except ValueError:
        raise FormatError(f"first line must be the system order, got {lines[0]!r}") from None
    if n < 1 or len(lines) < n + 1:
        raise FormatError(f"expected {n} matrix rows")
    rows = []
    for k, ln in enumerate(lines[1:n + 1]):
        parts = ln.split()
        if len(parts) != n + 1:
            raise FormatError(f"matrix row {k} has {len(parts)} entries, expected {n + 1}")
        rows.append([float(p) for p in parts])

    variables, beta = [], None
    rest = lines[n + 1:]
    pos = 0
    while pos < len(rest):
        head = rest[pos].split()
        if head[0] == "VARS":
            count = int(head[1])
            for ln in rest[pos + 1:pos + 1 + count]:
                variables.append(_parse_var(ln))
            if len(variables) != count:
                raise FormatError(f"VARS announced {count} entries, found {len(variables)}")
            pos += count + 1
        elif head[0] == "BETA":
            beta = int(head[1])
            pos += 1
        else:
            raise FormatError(f"unexpected line {rest[pos]!r}")
    return TimeVaryingSystem(AugmentedMatrix(rows), variables), beta


def _parse_var(line: str) -> VariableEntry:
    parts = line.split()
    if len(parts) < 3:
        raise FormatError(f"bad variable line {line!r}")
    row, col, kind = int(parts[0]), int(parts[1]), parts[2]
    params = tuple(float(p) for p in parts[3:])
    try:
        func = TimeFunction(kind, params)
    except ValueError as exc:
        raise FormatError(f"bad variable line {line!r}: {exc}") from None
    return VariableEntry(row, col, func)


def read_system(path) -> tuple:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_system(path, system: TimeVaryingSystem, beta: int | None = None) -> None:
    Path(path).write_text(dumps(system, beta), encoding="utf-8")
