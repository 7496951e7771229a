"""Timed baseline runs producing dumps and benchmark-schema CSV rows.

A run starts either from a fresh cavity (zero or seeded random interior)
or from an existing dump directory, advances a chosen stepper, and can
write the final fields as a dump plus one CSV row per run.  The CSV uses
the same column set as the engine's bench output so the two kinds of
records mix freely in one file; the pipeline column distinguishes them
("numpy-slice" / "numpy-naive").
"""

from __future__ import annotations

import csv
import platform
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .grids import (GridSpec, ValidationError, alloc_fields, random_fields,
                    read_dump, write_dump)
from .steppers import STEPPERS, check_fields, get_stepper

CSV_COLUMNS = ("size", "precision", "pipeline", "steps", "repeats",
               "mean_s", "std_s", "cells_per_s", "speedup", "baseline",
               "host", "notes")

# The f64 slice rows under this pipeline name are the reference everything
# else is reported against.
BASELINE_PIPELINE = "numpy-slice"


@dataclass(frozen=True)
class BaselineConfig:
    """One baseline run: grid or input dump, step count, and outputs.

    Exactly one of n / load_dump picks the starting state: n allocates a
    fresh cube (zero, or random interior when seed is given) while
    load_dump resumes from a dump directory, whose sidecar then fixes the
    grid and precision.  Shared knobs keep the engine CLI's semantics.
    """

    n: int | None = None
    steps: int = 100
    precision: str = "f64"
    seed: int | None = None
    amplitude: float = 1.0
    stepper: str = "slice"
    load_dump: str | None = None
    dump_out: str | None = None
    csv_out: str | None = None
    repeats: int = 1
    warmup: int = 0
    notes: str = ""

    def __post_init__(self):
        if (self.n is None) == (self.load_dump is None):
            raise ValidationError(
                "pass either n or load_dump, not both and not neither")
        if self.n is not None and self.n < 2:
            raise ValidationError("n must be >= 2, got %r" % (self.n,))
        if self.steps < 0:
            raise ValidationError("steps must be >= 0, got %r" % (self.steps,))
        if self.repeats < 1 or self.warmup < 0:
            raise ValidationError("repeats must be >= 1, warmup >= 0")
        if self.stepper not in STEPPERS:
            raise ValidationError(
                "stepper must be one of %s, got %r"
                % (list(STEPPERS), self.stepper))
        if self.load_dump is None and self.precision not in ("f32", "f64"):
            raise ValidationError(
                "precision must be f32 or f64, got %r" % (self.precision,))


@dataclass
class RunRecord:
    """One CSV row; field order matches CSV_COLUMNS."""

    size: int
    precision: str
    pipeline: str
    steps: int
    repeats: int
    mean_s: float
    std_s: float
    cells_per_s: float
    speedup: float | None
    baseline: str
    host: str
    notes: str = ""


def host_tag() -> str:
    return "%s/numpy" % (platform.machine() or "unknown")


def _initial_state(config: BaselineConfig):
    if config.load_dump is not None:
        fields, grid, meta = read_dump(config.load_dump)
        return fields, grid, meta.get("step", 0)
    grid = GridSpec(nx=config.n, ny=config.n, nz=config.n,
                    precision=config.precision)
    if config.seed is not None:
        return random_fields(grid, config.seed, config.amplitude), grid, 0
    return alloc_fields(grid), grid, 0


def _copy(fields: dict) -> dict:
    return {name: arr.copy() for name, arr in fields.items()}


def baseline_run(config: BaselineConfig):
    """Run the configured stepper and return (RunRecord, final fields, grid).

    Each timed repeat starts from a copy of the same initial state; timing
    covers the step loop only.  Side effects (dump, CSV row) happen after
    the measurements.
    """
    start, grid, step0 = _initial_state(config)
    check_fields(start, grid)
    stepper = get_stepper(config.stepper)

    if config.warmup:
        scratch = _copy(start)
        for _ in range(min(config.warmup, max(config.steps, 1))):
            stepper(scratch, grid)

    times = []
    final = start
    for _ in range(config.repeats):
        fields = _copy(start)
        t0 = time.perf_counter()
        for _ in range(config.steps):
            stepper(fields, grid)
        times.append(time.perf_counter() - t0)
        final = fields
    for arr in final.values():
        if not np.isfinite(arr).all():
            raise ValidationError(
                "non-finite values after %d steps; unstable input state"
                % config.steps)

    mean = statistics.fmean(times)
    std = statistics.stdev(times) if len(times) > 1 else 0.0
    record = RunRecord(
        size=grid.nx, precision=grid.precision,
        pipeline="numpy-" + config.stepper,
        steps=config.steps, repeats=config.repeats,
        mean_s=mean, std_s=std,
        cells_per_s=grid.cells * config.steps / mean if mean > 0 else 0.0,
        speedup=None, baseline="", host=host_tag(), notes=config.notes)

    if config.dump_out is not None:
        write_dump(final, grid, config.dump_out,
                   step=step0 + config.steps, seed=config.seed)
    if config.csv_out is not None:
        with open(config.csv_out, "a", newline="") as f:
            append_csv([record], f)
    return record, final, grid


def append_csv(records, fileobj):
    """Write records, emitting the header only when the file is empty."""
    at_start = fileobj.tell() == 0 if fileobj.seekable() else True
    w = csv.writer(fileobj)
    if at_start:
        w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.size, r.precision, r.pipeline, r.steps, r.repeats,
                    repr(r.mean_s), repr(r.std_s), repr(r.cells_per_s),
                    "" if r.speedup is None else repr(r.speedup),
                    r.baseline, r.host, r.notes])


def read_csv(fileobj):
    """Parse benchmark-schema CSV back into RunRecord rows."""
    rd = csv.reader(fileobj)
    header = next(rd)
    if tuple(header) != CSV_COLUMNS:
        raise ValidationError("unexpected CSV header %r" % (header,))
    out = []
    for row in rd:
        if not row:
            continue
        d = dict(zip(CSV_COLUMNS, row))
        out.append(RunRecord(
            size=int(d["size"]), precision=d["precision"],
            pipeline=d["pipeline"], steps=int(d["steps"]),
            repeats=int(d["repeats"]), mean_s=float(d["mean_s"]),
            std_s=float(d["std_s"]), cells_per_s=float(d["cells_per_s"]),
            speedup=float(d["speedup"]) if d["speedup"] else None,
            baseline=d["baseline"], host=d["host"], notes=d["notes"]))
    return out
