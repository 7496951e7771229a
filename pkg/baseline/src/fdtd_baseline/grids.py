"""Grid geometry and the shared on-disk field-dump format.

This package exchanges fields with the companion engine purely through its
dump directories: one little-endian raw file per component (row-major,
i slowest, k fastest) plus a JSON sidecar {component, shape, dtype, step,
params, seed}.  The reader and writer here are an independent implementation
of that wire format; round-trips are bit-exact, so a dump written by either
side loads identically in the other.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, asdict

import numpy as np

# CODATA vacuum constants, matching the engine's defaults.
EPS0 = 8.8541878128e-12  # F/m
MU0 = 1.25663706212e-6   # H/m

DTYPES = {"f32": np.float32, "f64": np.float64}
_WIRE = {"f32": "<f4", "f64": "<f8"}

COMPONENTS = ("ex", "ey", "ez", "hx", "hy", "hz")


class ValidationError(ValueError):
    """Bad configuration, malformed dump, or mismatched shapes."""


def component_shape(name, nx, ny, nz):
    """Staggered storage shape: E on cell edges, H on cell faces."""
    if name == "ex":
        return (nx, ny + 1, nz + 1)
    if name == "ey":
        return (nx + 1, ny, nz + 1)
    if name == "ez":
        return (nx + 1, ny + 1, nz)
    if name == "hx":
        return (nx + 1, ny, nz)
    if name == "hy":
        return (nx, ny + 1, nz)
    if name == "hz":
        return (nx, ny, nz + 1)
    raise ValidationError("unknown field component %r" % (name,))


@dataclass(frozen=True)
class GridSpec:
    """Cavity geometry, materials, precision, and time step.

    Field names and the to_dict/from_dict key set deliberately equal the
    sidecar "params" object the engine writes, so a GridSpec survives a
    dump round-trip in either direction unchanged.
    """

    nx: int
    ny: int
    nz: int
    dx: float = 1.0
    dy: float = 1.0
    dz: float = 1.0
    eps: float = EPS0
    mu: float = MU0
    precision: str = "f64"
    cfl_factor: float = 0.5
    dt: float | None = None

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise ValidationError("%s must be an integer, got %r" % (name, n))
            if n < 2:
                raise ValidationError("%s must be >= 2, got %d" % (name, n))
        for name in ("dx", "dy", "dz", "eps", "mu"):
            if not (getattr(self, name) > 0):
                raise ValidationError(
                    "%s must be > 0, got %r" % (name, getattr(self, name)))
        if not (0 < self.cfl_factor <= 1):
            raise ValidationError(
                "cfl_factor must be in (0, 1], got %r" % (self.cfl_factor,))
        if self.precision not in DTYPES:
            raise ValidationError(
                "precision must be one of %s, got %r"
                % (sorted(DTYPES), self.precision))
        limit = self.cfl_limit()
        if self.dt is None:
            object.__setattr__(self, "dt", self.cfl_factor * limit)
        elif not (self.dt > 0):
            raise ValidationError("dt must be > 0, got %r" % (self.dt,))
        elif self.dt > limit:
            raise ValidationError(
                "dt=%g exceeds the stability limit %g" % (self.dt, limit))

    def cfl_limit(self) -> float:
        c = 1.0 / math.sqrt(self.eps * self.mu)
        return 1.0 / (c * math.sqrt(
            1.0 / self.dx ** 2 + 1.0 / self.dy ** 2 + 1.0 / self.dz ** 2))

    @property
    def dtype(self):
        return DTYPES[self.precision]

    @property
    def cells(self):
        return self.nx * self.ny * self.nz

    def shape(self, component):
        return component_shape(component, self.nx, self.ny, self.nz)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in (
            "nx", "ny", "nz", "dx", "dy", "dz", "eps", "mu",
            "precision", "cfl_factor", "dt") if k in d}
        for k in ("nx", "ny", "nz"):
            known[k] = int(known[k])
        return cls(**known)


def alloc_fields(grid: GridSpec) -> dict:
    """Zeroed staggered arrays keyed by component name."""
    return {c: np.zeros(grid.shape(c), dtype=grid.dtype) for c in COMPONENTS}


def random_fields(grid: GridSpec, seed: int, amplitude: float = 1.0) -> dict:
    """Uniform random interior E values; wall-tangential E stays exactly 0.

    Same PCG64 seeding as the engine's random init, so equal seeds give
    equal starting states across the two implementations.
    """
    fields = alloc_fields(grid)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    interior = {
        "ex": (slice(None), slice(1, -1), slice(1, -1)),
        "ey": (slice(1, -1), slice(None), slice(1, -1)),
        "ez": (slice(1, -1), slice(1, -1), slice(None)),
    }
    for name, sl in interior.items():
        values = rng.uniform(-amplitude, amplitude,
                             size=fields[name][sl].shape)
        fields[name][sl] = values.astype(grid.dtype)
    return fields


def write_dump(fields: dict, grid: GridSpec, outdir: str, step: int = 0,
               seed: int | None = None):
    """Write all six components (raw + sidecar) into outdir."""
    os.makedirs(outdir, exist_ok=True)
    for comp in COMPONENTS:
        arr = fields[comp]
        raw = arr.astype(_WIRE[grid.precision], copy=False).tobytes()
        with open(os.path.join(outdir, comp + ".raw"), "wb") as f:
            f.write(raw)
        sidecar = {
            "component": comp,
            "shape": list(arr.shape),
            "dtype": grid.precision,
            "step": step,
            "params": grid.to_dict(),
            "seed": seed,
        }
        with open(os.path.join(outdir, comp + ".json"), "w") as f:
            json.dump(sidecar, f, indent=1, sort_keys=True)
            f.write("\n")


def read_dump(dumpdir: str):
    """Load a dump directory back as (fields dict, GridSpec, last sidecar).

    Validates every component against its sidecar (known dtype, raw size)
    and against the staggered shape the sidecar's grid implies.
    """
    fields = {}
    meta = None
    grid = None
    for comp in COMPONENTS:
        with open(os.path.join(dumpdir, comp + ".json")) as f:
            meta = json.load(f)
        if meta.get("dtype") not in _WIRE:
            raise ValidationError("sidecar for %s has unknown dtype %r"
                                  % (comp, meta.get("dtype")))
        wire = np.fromfile(os.path.join(dumpdir, comp + ".raw"),
                           dtype=_WIRE[meta["dtype"]])
        shape = tuple(int(v) for v in meta["shape"])
        if wire.size != int(np.prod(shape)):
            raise ValidationError(
                "raw size %d of %s does not match sidecar shape %s"
                % (wire.size, comp, shape))
        if grid is None:
            grid = GridSpec.from_dict(meta["params"])
        expect = grid.shape(comp)
        if shape != expect:
            raise ValidationError(
                "%s has shape %s; the sidecar grid implies %s"
                % (comp, shape, expect))
        native = DTYPES[meta["dtype"]]
        fields[comp] = np.ascontiguousarray(
            wire.reshape(shape).astype(native))
    return fields, grid, meta
