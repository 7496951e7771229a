"""Command-line entry points.

Exit codes: 0 success, 1 bad input (usage, validation, script diagnostics),
2 runtime failure (instability, IO errors, dump mismatches).  Diagnostics go
to stderr; machine-readable output goes to stdout or to files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as benchmod
from .engine import descriptor_text, pipeline_kernel, run
from .errors import InstabilityError, ValidationError
from .fieldio import compare_dumps, dump_fields
from .fields import InitialCondition, energy, make_fields
from .ir import build_step_program, program_text
from .params import COMPONENTS, SimParams
from .transforms import PIPELINES
from .vtkio import export_vtk


class _Parser(argparse.ArgumentParser):
    """argparse flavor that exits 1 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(1)


def _add_grid_args(p):
    p.add_argument("--n", type=int, help="cube cell count (sets nx=ny=nz)")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--dx", type=float)
    p.add_argument("--dy", type=float)
    p.add_argument("--dz", type=float)
    p.add_argument("--eps", type=float, help="permittivity (default vacuum)")
    p.add_argument("--mu", type=float, help="permeability (default vacuum)")
    p.add_argument("--unit", action="store_true",
                   help="unit cavity: eps=mu=1 and spacings 1/n")
    p.add_argument("--precision", choices=("f32", "f64"), default="f64")
    p.add_argument("--cfl-factor", type=float, default=0.5)
    p.add_argument("--dt", type=float, help="explicit step (default from CFL)")
    p.add_argument("--allow-unstable", action="store_true",
                   help="accept a dt above the stability limit")


def _add_sched_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--pipeline", choices=PIPELINES, default="none")
    g.add_argument("--script", help="schedule script file")
    p.add_argument("--tile-size", type=int)


def _add_init_args(p):
    p.add_argument("--init", default="zero",
                   help="zero | random | mode:m,n,p")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=1.0)


def _params_from_args(args) -> SimParams:
    nx = args.nx if args.nx is not None else args.n
    ny = args.ny if args.ny is not None else args.n
    nz = args.nz if args.nz is not None else args.n
    if nx is None or ny is None or nz is None:
        raise ValidationError("grid size missing: pass --n or --nx/--ny/--nz")

    def spacing(explicit, n):
        if explicit is not None:
            return explicit
        return 1.0 / n if args.unit else 1.0

    kw = dict(nx=nx, ny=ny, nz=nz,
              dx=spacing(args.dx, nx), dy=spacing(args.dy, ny),
              dz=spacing(args.dz, nz),
              precision=args.precision, cfl_factor=args.cfl_factor)
    if args.eps is not None:
        kw["eps"] = args.eps
    elif args.unit:
        kw["eps"] = 1.0
    if args.mu is not None:
        kw["mu"] = args.mu
    elif args.unit:
        kw["mu"] = 1.0
    if args.dt is not None:
        kw["dt"] = args.dt
    if args.allow_unstable:
        kw["enforce_cfl"] = False
    return SimParams(**kw)


def _kernel_from_args(args, params):
    # argparse keeps --pipeline/--script mutually exclusive, so a script
    # always arrives with the pipeline at its "none" default
    script_text = None
    if args.script is not None:
        with open(args.script) as f:
            script_text = f.read()
    return pipeline_kernel(params, pipeline=args.pipeline,
                           script_text=script_text,
                           tile_size=args.tile_size)


def _cmd_run(args) -> int:
    params = _params_from_args(args)
    if args.dump_out is not None:
        os.makedirs(args.dump_out, exist_ok=True)
        if not os.access(args.dump_out, os.W_OK):
            raise OSError("dump directory %r is not writable" % args.dump_out)
    kernel = _kernel_from_args(args, params)
    init = InitialCondition.parse(args.init, seed=args.seed,
                                  amplitude=args.amplitude)
    fields = make_fields(params, init)
    stats = run(kernel, fields, args.steps,
                check_interval=args.check_interval)
    if args.dump_out is not None:
        dump_fields(fields, args.dump_out, step=args.steps, seed=args.seed)
    print(json.dumps({
        "steps": stats.steps,
        "wall_s": stats.wall_s,
        "mean_step_s": stats.mean_step_s,
        "cells_per_s": stats.cells_per_s,
        "energy": energy(fields),
    }, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    config = benchmod.BenchConfig(
        sizes=tuple(int(v) for v in args.sizes.split(",") if v),
        steps=args.steps, repeats=args.repeats, warmup=args.warmup,
        precisions=tuple(args.precisions.split(",")),
        pipelines=tuple(args.pipelines.split(",")),
        seed=args.seed, tile_size=args.tile_size,
        mem_cap_gb=args.mem_cap_gb, pin=args.pin, notes=args.notes)
    records = benchmod.run_benchmark(
        config, progress=lambda msg: print("bench: " + msg, file=sys.stderr))
    for w in benchmod.check_ordering(records):
        print("warning: " + w, file=sys.stderr)
    if args.csv == "-":
        benchmod.write_csv(records, sys.stdout)
    else:
        with open(args.csv, "w", newline="") as f:
            benchmod.write_csv(records, f)
        print("wrote %d records to %s" % (len(records), args.csv),
              file=sys.stderr)
    return 0


def _cmd_dump_ir(args) -> int:
    params = _params_from_args(args)
    program = build_step_program(params)
    out = [program_text(program)]
    if args.script is not None or args.pipeline != "none":
        kernel = _kernel_from_args(args, params)
        out.append(descriptor_text(kernel))
    text = "\n".join(out)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
    return 0


def _cmd_export_vtk(args) -> int:
    params = _params_from_args(args)
    init = InitialCondition.parse(args.init, seed=args.seed,
                                  amplitude=args.amplitude)
    fields = make_fields(params, init)
    if args.steps:
        kernel = _kernel_from_args(args, params)
        run(kernel, fields, args.steps)
    if args.component == "all":
        os.makedirs(args.out, exist_ok=True)
        for comp in COMPONENTS:
            export_vtk(fields, comp, os.path.join(args.out, comp + ".vtk"),
                       step=args.steps)
    else:
        export_vtk(fields, args.component, args.out, step=args.steps)
    return 0


def _cmd_compare_dumps(args) -> int:
    ok, report = compare_dumps(args.dir_a, args.dir_b,
                               max_ulps=args.max_ulps)
    for entry in report:
        if "error" in entry:
            print("%s ERROR %s" % (entry["component"], entry["error"]))
        elif entry["over"]:
            print("%s MISMATCH max_ulp=%d over=%d first_index=%d"
                  % (entry["component"], entry["max_ulp"], entry["over"],
                     entry["first_index"]))
        else:
            print("%s ok max_ulp=%d" % (entry["component"], entry["max_ulp"]))
    if not ok:
        print("dumps differ beyond %d ulps" % args.max_ulps, file=sys.stderr)
        return 2
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fdtdkit",
                     description="Schedulable FDTD cavity simulator")
    sub = parser.add_subparsers(dest="cmd", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("run", help="time-step a cavity and report stats")
    _add_grid_args(p)
    _add_sched_args(p)
    _add_init_args(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--check-interval", type=int, default=100)
    p.add_argument("--dump-out", help="directory for field dumps")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("bench", help="run the benchmark matrix, emit CSV")
    p.add_argument("--sizes", default="32,64")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--warmup", type=int, default=100)
    p.add_argument("--precisions", default="f32,f64")
    p.add_argument("--pipelines", default="none,tile,tile+vec,tile+vec+fuse")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tile-size", type=int)
    p.add_argument("--mem-cap-gb", type=float, default=8.0)
    p.add_argument("--pin", action="store_true",
                   help="pin the process to one core")
    p.add_argument("--notes", default="")
    p.add_argument("--csv", default="-", help="output path ('-' = stdout)")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("dump-ir",
                       help="print the step program (and schedule, if any)")
    _add_grid_args(p)
    _add_sched_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=_cmd_dump_ir)

    p = sub.add_parser("export-vtk", help="write fields as legacy VTK")
    _add_grid_args(p)
    _add_sched_args(p)
    _add_init_args(p)
    p.add_argument("--steps", type=int, default=0,
                   help="advance this many steps before exporting")
    p.add_argument("--component", default="ez",
                   choices=COMPONENTS + ("all",))
    p.add_argument("--out", required=True,
                   help="output file (or directory with --component all)")
    p.set_defaults(fn=_cmd_export_vtk)

    p = sub.add_parser("compare-dumps",
                       help="ULP-compare two dump directories")
    p.add_argument("dir_a")
    p.add_argument("dir_b")
    p.add_argument("--max-ulps", type=int, default=0)
    p.set_defaults(fn=_cmd_compare_dumps)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ValidationError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    except InstabilityError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
