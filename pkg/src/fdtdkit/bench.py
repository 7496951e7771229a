"""Benchmark harness: timed step loops over a size/precision/pipeline matrix.

Timing covers the step loop only; allocation, initialization, and kernel
builds happen outside the clock.  Every matrix cell starts from the same
seeded initial state.  Each timed run is sanity-checked afterwards: fields
must stay finite and the stored-field energy must stay inside the
oscillation envelope (it is not conserved exactly on the staggered grid,
but it cannot drift far at a stable step size).
"""

from __future__ import annotations

import csv
import math
import os
import platform
import statistics
from dataclasses import dataclass

from .engine import pipeline_kernel, run
from .errors import ValidationError
from .fields import InitialCondition, energy, make_fields
from .params import DTYPES, SimParams
from .target import Target, detect_target
from .transforms import PIPELINES

CSV_COLUMNS = ("size", "precision", "pipeline", "steps", "repeats",
               "mean_s", "std_s", "cells_per_s", "speedup", "baseline",
               "host", "notes")

# Measured worst relative energy swing at cfl 0.5 with random init is ~0.27;
# 0.6 keeps 2x headroom while still catching blowups and dead kernels.
ENERGY_GUARD = 0.6


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple = (32, 64)
    steps: int = 1000
    repeats: int = 10
    warmup: int = 100
    precisions: tuple = ("f32", "f64")
    pipelines: tuple = ("none", "tile", "tile+vec", "tile+vec+fuse")
    seed: int = 0
    tile_size: int | None = None
    mem_cap_gb: float = 8.0
    pin: bool = False
    notes: str = ""

    def __post_init__(self):
        if not self.sizes:
            raise ValidationError("sizes must be non-empty")
        for n in self.sizes:
            if int(n) < 2:
                raise ValidationError("size %r must be >= 2" % (n,))
        if self.steps < 1 or self.repeats < 1 or self.warmup < 0:
            raise ValidationError("steps/repeats must be >= 1, warmup >= 0")
        for p in self.precisions:
            if p not in DTYPES:
                raise ValidationError("unknown precision %r" % (p,))
        for pl in self.pipelines:
            if pl not in PIPELINES:
                raise ValidationError("unknown pipeline %r" % (pl,))


@dataclass
class BenchRecord:
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


def _check_mem(config: BenchConfig):
    cap = config.mem_cap_gb * 2.0 ** 30
    for n in config.sizes:
        for prec in config.precisions:
            elem = DTYPES[prec]().itemsize
            # 6 live arrays of at most (n+1)^3 plus scratch copies.
            need = 8 * (n + 1) ** 3 * elem
            if need > cap:
                raise ValidationError(
                    "size %d at %s needs ~%.2f GiB which exceeds the "
                    "%.2f GiB cap" % (n, prec, need / 2.0 ** 30,
                                      config.mem_cap_gb))


def _guard(fields, e0: float, cell: str):
    e1 = energy(fields)
    if not math.isfinite(e1):
        raise ValidationError("non-finite energy after benchmark run %s" % cell)
    if e0 > 0 and abs(e1 - e0) / e0 > ENERGY_GUARD:
        raise ValidationError(
            "energy moved from %g to %g during benchmark run %s; "
            "result rejected" % (e0, e1, cell))


def host_tag(target: Target) -> str:
    return "%s/%s" % (platform.machine() or "unknown", target.name)


def run_benchmark(config: BenchConfig, target: Target | None = None,
                  progress=None):
    """Run the full matrix and return a list of BenchRecord."""
    _check_mem(config)
    if target is None:
        target = detect_target()
    if config.pin:
        cpus = os.sched_getaffinity(0)
        os.sched_setaffinity(0, {min(cpus)})
    host = host_tag(target)
    init = InitialCondition("random_interior", seed=config.seed)
    records = []
    for n in config.sizes:
        for prec in config.precisions:
            params = SimParams(nx=n, ny=n, nz=n, precision=prec)
            group = []
            for pipe in config.pipelines:
                cell = "size=%d precision=%s pipeline=%s" % (n, prec, pipe)
                if progress:
                    progress(cell)
                kernel = pipeline_kernel(params, pipe, target=target,
                                         tile_size=config.tile_size)
                if config.warmup:
                    w = make_fields(params, init)
                    run(kernel, w, config.warmup)
                times = []
                for _ in range(config.repeats):
                    fields = make_fields(params, init)
                    e0 = energy(fields)
                    stats = run(kernel, fields, config.steps)
                    _guard(fields, e0, cell)
                    times.append(stats.wall_s)
                mean = statistics.fmean(times)
                std = statistics.stdev(times) if len(times) > 1 else 0.0
                group.append(BenchRecord(
                    size=n, precision=prec, pipeline=pipe,
                    steps=config.steps, repeats=config.repeats,
                    mean_s=mean, std_s=std,
                    cells_per_s=params.cells * config.steps / mean,
                    speedup=None, baseline="", host=host,
                    notes=config.notes))
            base = next((r for r in group if r.pipeline == "none"), None)
            if base is not None:
                for r in group:
                    r.speedup = base.mean_s / r.mean_s
                    r.baseline = "none"
            records.extend(group)
    return records


def check_ordering(records):
    """Soft sanity: more aggressive presets should not run slower.

    Returns human-readable warnings; an inversion is suspicious on this
    machine but can be legitimate elsewhere, so it never raises.
    """
    warnings = []
    by_cell = {}
    for r in records:
        by_cell[(r.size, r.precision, r.pipeline)] = r

    def t(size, prec, pipe):
        r = by_cell.get((size, prec, pipe))
        return r.mean_s if r else None

    keys = sorted({(r.size, r.precision) for r in records})
    chain = ("tile+vec+fuse", "tile+vec", "tile", "none")
    for size, prec in keys:
        means = [t(size, prec, p) for p in chain]
        for a in range(len(chain) - 1):
            if means[a] is None:
                continue
            for b in range(a + 1, len(chain)):
                if means[b] is None:
                    continue
                slack = 1.25 if chain[b] == "none" else 1.0
                if means[a] > means[b] * slack:
                    warnings.append(
                        "size=%d precision=%s: %s (%.4gs) slower than %s "
                        "(%.4gs)" % (size, prec, chain[a], means[a],
                                     chain[b], means[b]))
                break
    return warnings


def speedup_table(records, baseline: str = "none"):
    """Rows of (size, precision, pipeline, mean_s, speedup vs baseline).

    Every (size, precision) group must contain the baseline pipeline.
    """
    by_key = {}
    for r in records:
        by_key.setdefault((r.size, r.precision), []).append(r)
    rows = []
    for key in sorted(by_key):
        group = by_key[key]
        base = next((r for r in group if r.pipeline == baseline), None)
        if base is None:
            raise ValidationError(
                "no %r baseline for size=%d precision=%s"
                % (baseline, key[0], key[1]))
        for r in group:
            rows.append({"size": r.size, "precision": r.precision,
                         "pipeline": r.pipeline, "mean_s": r.mean_s,
                         "speedup": base.mean_s / r.mean_s})
    return rows


def write_csv(records, fileobj):
    w = csv.writer(fileobj)
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.size, r.precision, r.pipeline, r.steps, r.repeats,
                    repr(r.mean_s), repr(r.std_s), repr(r.cells_per_s),
                    "" if r.speedup is None else repr(r.speedup),
                    r.baseline, r.host, r.notes])


def read_csv(fileobj):
    rd = csv.reader(fileobj)
    header = next(rd)
    if tuple(header) != CSV_COLUMNS:
        raise ValidationError("unexpected CSV header %r" % (header,))
    out = []
    for row in rd:
        if not row:
            continue
        d = dict(zip(CSV_COLUMNS, row))
        out.append(BenchRecord(
            size=int(d["size"]), precision=d["precision"],
            pipeline=d["pipeline"], steps=int(d["steps"]),
            repeats=int(d["repeats"]), mean_s=float(d["mean_s"]),
            std_s=float(d["std_s"]), cells_per_s=float(d["cells_per_s"]),
            speedup=float(d["speedup"]) if d["speedup"] else None,
            baseline=d["baseline"], host=d["host"], notes=d["notes"]))
    return out
