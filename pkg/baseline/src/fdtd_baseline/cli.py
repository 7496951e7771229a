"""Command-line entry points for the baseline package.

Exit codes match the engine CLI: 0 success, 1 bad input, 2 runtime or IO
failure.  Diagnostics go to stderr; records and tables go to stdout or to
files.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .grids import ValidationError
from .plotting import load_records, plot_speedups, render_table, speedup_rows
from .runner import BaselineConfig, append_csv, baseline_run
from .steppers import STEPPERS


class _Parser(argparse.ArgumentParser):
    """argparse flavor that exits 1 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(1)


def _cmd_run(args) -> int:
    config = BaselineConfig(
        n=args.n, steps=args.steps, precision=args.precision,
        seed=args.seed, amplitude=args.amplitude, stepper=args.stepper,
        load_dump=args.load, dump_out=args.dump_out,
        csv_out=args.csv if args.csv not in (None, "-") else None,
        repeats=args.repeats, warmup=args.warmup, notes=args.notes)
    record, _, grid = baseline_run(config)
    if args.csv == "-":
        buf = io.StringIO()
        append_csv([record], buf)
        sys.stdout.write(buf.getvalue())
    else:
        print(json.dumps({
            "size": record.size, "precision": record.precision,
            "pipeline": record.pipeline, "steps": record.steps,
            "mean_s": record.mean_s, "cells_per_s": record.cells_per_s,
        }, sort_keys=True))
    return 0


def _cmd_plot(args) -> int:
    if args.print_table:
        rows = speedup_rows(load_records(args.csv))
        sys.stdout.write(render_table(rows))
        return 0
    paths = plot_speedups(args.csv, outdir=args.outdir, fmt=args.fmt)
    for path in paths:
        print(path)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fdtd-baseline",
                     description="NumPy FDTD baselines and speedup plots")
    sub = parser.add_subparsers(dest="cmd", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("run", help="time-step the numpy baseline")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="cube cell count (sets nx=ny=nz)")
    g.add_argument("--load", help="start from this dump directory")
    p.add_argument("--precision", choices=("f32", "f64"), default="f64")
    p.add_argument("--stepper", choices=STEPPERS, default="slice")
    p.add_argument("--seed", type=int,
                   help="random interior init (fresh grids only)")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--warmup", type=int, default=0)
    p.add_argument("--dump-out", help="directory for field dumps")
    p.add_argument("--csv", help="append a record here ('-' = stdout)")
    p.add_argument("--notes", default="")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("plot-speedups",
                       help="charts or a table of speedups from CSV files")
    p.add_argument("--csv", nargs="+", required=True,
                   help="benchmark CSV files to combine")
    p.add_argument("--outdir", default=".")
    p.add_argument("--fmt", default="png", choices=("png", "svg", "pdf"))
    p.add_argument("--print-table", action="store_true",
                   help="print exact ratios as text instead of plotting")
    p.set_defaults(fn=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ValidationError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
