"""``gjesim`` command line: solve, reduce, simulate, gen, bench."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .bench import PRESET_SIZES, BenchConfig, run_benchmark
from .core import inject_variables
from .generators import FAMILIES, GenSpec, generate
from .parallel import gauss_jordan_parallel, resolve_threads
from .reduction import reduce_system
from .serial import gauss_jordan_serial
from .simulation import MODES, SimulationConfig, simulate
from .textio import dumps, read_system, write_system


def _csv_list(kind):
    def parse(text):
        return tuple(kind(x) for x in text.split(",") if x.strip())
    return parse


def cmd_solve(args) -> int:
    system, beta = read_system(args.input)
    A = inject_variables(system, args.t)
    p = resolve_threads(args.threads)
    if args.mode == "parallel":
        out = gauss_jordan_parallel(A, p, args.eps, diagnostics=args.diagnostics)
    else:
        out = gauss_jordan_serial(A, args.eps)
    text = "\n".join(repr(float(v)) for v in out.solution) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.diagnostics and out.worker_stats:
        for s in out.worker_stats:
            print(f"worker {s.rank} rows [{s.rows[0]},{s.rows[1]}) pre={s.pre_ns}ns diag={s.diag_ns}ns "
                  f"post={s.post_ns}ns wait={s.wait_ns}ns updates={s.counters.element_updates} swaps={s.swaps}",
                  file=sys.stderr)
    return 0


def cmd_reduce(args) -> int:
    system, _ = read_system(args.input)
    red = reduce_system(system, args.eps)
    if red.completed < red.beta:
        print(f"warning: reduction stopped at pivot {red.completed} (boundary {red.beta})", file=sys.stderr)
    reduced = red.as_system()
    if args.out:
        write_system(args.out, reduced, red.beta)
    else:
        sys.stdout.write(dumps(reduced, red.beta))
    return 0


def cmd_simulate(args) -> int:
    system, _ = read_system(args.input)
    cfg = SimulationConfig(args.t0, args.dt, args.steps, args.mode, resolve_threads(args.threads), args.eps)
    series = simulate(system, cfg)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x{k}" for k in range(system.n)] + ["element_updates"])
        for t, x, c in zip(series.times, series.states, series.counters):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [c.element_updates])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_gen(args) -> int:
    spec = GenSpec(args.n, args.seed, args.family, args.reduction_fraction, args.var_fraction)
    system = generate(spec)
    if args.out:
        write_system(args.out, system)
    else:
        sys.stdout.write(dumps(system))
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(families=args.families, sizes=args.sizes, threads=args.threads_list,
                      reductions=args.reduction_list, reps=args.reps, warmup=args.warmup, seed=args.seed)

    def progress(row):
        status = row.error or f"median {row.median_ns / 1e6:.3f} ms"
        print(f"{row.family} n={row.n} p={row.threads} f={row.reduction_fraction}: {status}", file=sys.stderr)

    report = run_benchmark(cfg, progress=progress if args.verbose else None)
    text = report.to_csv() if args.format == "csv" else report.to_json() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gjesim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one system at a given time")
    s.add_argument("--input", required=True)
    s.add_argument("--t", type=float, default=0.0, help="time used to evaluate variable entries")
    s.add_argument("--mode", choices=("serial", "parallel"), default="serial")
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--diagnostics", action="store_true", help="per-worker timings and op counts on stderr")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", help="partially reduce up to the boundary")
    r.add_argument("--input", required=True)
    r.add_argument("--eps", type=float, default=None)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    m = sub.add_parser("simulate", help="time-stepping simulation to CSV")
    m.add_argument("--input", required=True)
    m.add_argument("--t0", type=float, default=0.0)
    m.add_argument("--dt", type=float, required=True)
    m.add_argument("--steps", type=int, required=True)
    m.add_argument("--mode", choices=MODES, default="full-serial")
    m.add_argument("--threads", type=int, default=None)
    m.add_argument("--eps", type=float, default=None)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    g = sub.add_parser("gen", help="generate a benchmark input")
    g.add_argument("--family", choices=FAMILIES, default="random-dense")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--reduction-fraction", type=float, default=None)
    g.add_argument("--var-fraction", type=float, default=0.0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run the benchmark grid")
    b.add_argument("--families", type=_csv_list(str), default=FAMILIES)
    b.add_argument("--sizes", type=_csv_list(int), default=PRESET_SIZES)
    b.add_argument("--threads-list", type=_csv_list(int), default=(1, 2, 4, 8))
    b.add_argument("--reduction-list", type=_csv_list(float), default=(0.0, 0.19, 0.5))
    b.add_argument("--reps", type=int, default=200)
    b.add_argument("--warmup", type=int, default=10)
    b.add_argument("--seed", type=int, default=2024)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"gjesim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
