"""Command line interface.

Exit codes: 0 success, 1 invalid input, 2 failure during a run, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analysis import (
    detect_maxima,
    growth_factor,
    probe_name,
    significant_digit_agreement,
)
from .engine import NO_PRUNING, EngineState, NonFiniteError, PrunePolicy, ValidationError, run
from .fileio import (
    FormatError,
    export_series_csv,
    load_lattice,
    load_table,
    read_series_csv,
    save_lattice,
    write_run_record,
)
from .figures import reproduce_figure
from .lattice import SparseLattice
from .maxwell import (
    ORIGIN,
    FieldState,
    PhysicalScale,
    canonical_initial_state,
    coupling_factor,
    run_maxwell,
)

EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _probe(text: str):
    try:
        name, coords = text.split(":")
        x, y, z = (int(c) for c in coords.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"probe must look like LAT:x,y,z, got {text!r}") from None
    return name, (x, y, z)


def _scale(text: str) -> PhysicalScale:
    try:
        c, dt, ds = (float(v) for v in text.split(","))
        return PhysicalScale(c, dt, ds)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"scale must be c,dt,ds with positive values: {exc}") from None


def _policy(budget: int | None) -> PrunePolicy:
    return NO_PRUNING if budget is None else PrunePolicy.budget(budget)


def cmd_run(args) -> int:
    probes = args.probe or [("Ex", ORIGIN)]
    policy = _policy(args.prune_budget)
    if args.table:
        if args.p is not None or args.scale is not None:
            raise ValidationError("--table replaces --p/--scale")
        if args.backend != "table":
            raise ValidationError("--table requires --backend table")
        table = load_table(args.table)
        lattices = {lat.name: lat for lat in map(load_lattice, args.init or [])}
        if not lattices:
            lattices = canonical_initial_state().lattices
        for e in table:
            for name in (e.source, e.destination):
                lattices.setdefault(name, SparseLattice(name, next(iter(lattices.values())).iteration))
        record = run(EngineState(lattices), table, args.steps, probes, policy)
    else:
        if (args.p is None) == (args.scale is None):
            raise ValidationError("give exactly one of --p or --scale")
        p = args.p if args.p is not None else float(coupling_factor(args.scale))
        state = None
        if args.init:
            state = FieldState([load_lattice(f) for f in args.init])
        record = run_maxwell(p, args.steps, probes, policy, backend=args.backend, state=state)
    paths = write_run_record(record, args.out)
    if args.save_lattices:
        for lat in record.final_state.lattices.values():
            save_lattice(lat, Path(args.out) / f"{lat.name}.lat")
    for k, (name, site) in enumerate(record.probes):
        print(f"{probe_name(name, site)} at t={record.iterations[-1]}: {float(record.values[-1, k].real)!r}")
    print(f"wrote {paths['series']}")
    return 0


def _pick(path, probe) -> object:
    series = read_series_csv(path)
    if probe is None:
        return series[0]
    name = probe_name(*probe)
    for s in series:
        if s.name == name:
            return s
    raise ValidationError(f"no column {name!r} in {path}")


def _record_csv(path: str) -> Path:
    p = Path(path)
    return p / "series.csv" if p.is_dir() else p


def cmd_probe(args) -> int:
    s = _pick(_record_csv(args.record), args.probe)
    export_series_csv([s], args.out or sys.stdout)
    return 0


def cmd_maxima(args) -> int:
    s = _pick(_record_csv(args.record), args.probe)
    rep = detect_maxima(s)
    print(f"# {s.name}: t height")
    for t, h in rep.maxima:
        print(f"{t} {float(h)!r}")
    if args.window:
        g = growth_factor(s, tuple(args.window))
        print(f"# growth factor per step over {g.window}: {float(g.per_step_factor)!r}")
    return 0


def cmd_figure(args) -> int:
    paths = reproduce_figure(args.number, args.out)
    print(f"wrote {paths['svg']} and {paths['csv']}")
    return 0


def cmd_compare_prune(args) -> int:
    probe = ("Ex", ORIGIN)
    full = run_maxwell(args.p, args.steps, [probe])
    pruned = run_maxwell(args.p, args.steps, [probe], PrunePolicy.budget(args.prune_budget))
    a = full.series(*probe)[-1].real
    b = pruned.series(*probe)[-1].real
    print(f"unpruned {float(a)!r}")
    print(f"pruned   {float(b)!r}  ({len(pruned.prune_reports)} prune events)")
    print(f"agreeing significant digits: {significant_digit_agreement(a, b)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latmaxwell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a simulation and write its probe record")
    r.add_argument("--p", type=float, help="coupling factor")
    r.add_argument("--scale", type=_scale, help="c,dt,ds giving p = c*dt/ds")
    r.add_argument("--steps", type=int, required=True)
    r.add_argument("--backend", choices=["table", "direct"], default="table")
    r.add_argument("--prune-budget", type=int, help="max stored sites per lattice")
    r.add_argument("--probe", type=_probe, action="append", help="LAT:x,y,z (repeatable)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--table", help="custom coupling-table file")
    r.add_argument("--init", action="append", help="initial lattice file (repeatable)")
    r.add_argument("--save-lattices", action="store_true", help="also write final lattices")
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("probe", help="extract one series from a run record")
    pr.add_argument("record", help="run output directory or its series.csv")
    pr.add_argument("--probe", type=_probe)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_probe)

    m = sub.add_parser("maxima", help="wave maxima and growth factor of a series")
    m.add_argument("record")
    m.add_argument("--probe", type=_probe)
    m.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    m.set_defaults(func=cmd_maxima)

    f = sub.add_parser("figure", help="reproduce one of the figures 1-9")
    f.add_argument("number", type=int, choices=range(1, 10))
    f.add_argument("--out", default=".")
    f.set_defaults(func=cmd_figure)

    c = sub.add_parser("compare-prune", help="origin value with and without pruning")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.add_argument("--prune-budget", type=int, required=True)
    c.set_defaults(func=cmd_compare_prune)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"latmaxwell: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NonFiniteError, ArithmeticError) as exc:
        print(f"latmaxwell: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValidationError, FormatError, ValueError, KeyError) as exc:
        print(f"latmaxwell: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
