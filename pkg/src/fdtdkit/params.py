"""Simulation parameters, stability limit, and precision handling."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ValidationError

# CODATA vacuum constants.
EPS0 = 8.8541878128e-12  # F/m
MU0 = 1.25663706212e-6   # H/m

DTYPES = {"f32": np.float32, "f64": np.float64}

# Staggered component shapes as functions of the cell counts.  E components
# live on cell edges, H components on cell faces; these shapes make every
# curl stencil in-bounds by construction.
COMPONENTS = ("ex", "ey", "ez", "hx", "hy", "hz")


def component_shape(name, nx, ny, nz):
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


def _check_positive(**kv):
    for name, value in kv.items():
        if not (value > 0):
            raise ValidationError("%s must be > 0, got %r" % (name, value))


@dataclass(frozen=True)
class SimParams:
    """Grid geometry, material constants, time step, and precision.

    dt may be given explicitly; when omitted it is derived as
    cfl_factor * cfl_limit.  Construction validates the stability bound
    dt <= cfl_limit unless enforce_cfl=False (used by the instability tests
    and the CLI's --allow-unstable flag, which exist to show what happens
    beyond the limit).
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
    enforce_cfl: bool = True

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise ValidationError("%s must be an integer, got %r" % (name, n))
            if n < 2:
                raise ValidationError("%s must be >= 2, got %d" % (name, n))
        _check_positive(dx=self.dx, dy=self.dy, dz=self.dz, eps=self.eps, mu=self.mu)
        if not (0 < self.cfl_factor <= 1):
            raise ValidationError(
                "cfl_factor must be in (0, 1], got %r" % (self.cfl_factor,))
        if self.precision not in DTYPES:
            raise ValidationError(
                "precision must be one of %s, got %r"
                % (sorted(DTYPES), self.precision))
        limit = cfl_limit(self)
        if self.dt is None:
            object.__setattr__(self, "dt", self.cfl_factor * limit)
        else:
            if not (self.dt > 0):
                raise ValidationError("dt must be > 0, got %r" % (self.dt,))
            if self.enforce_cfl and self.dt > limit:
                raise ValidationError(
                    "dt=%g exceeds the stability limit %g; pass "
                    "enforce_cfl=False to run anyway" % (self.dt, limit))

    @property
    def dtype(self):
        return DTYPES[self.precision]

    @property
    def cells(self):
        return self.nx * self.ny * self.nz

    def shape(self, component):
        return component_shape(component, self.nx, self.ny, self.nz)

    def to_dict(self):
        d = asdict(self)
        del d["enforce_cfl"]
        return d

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in (
            "nx", "ny", "nz", "dx", "dy", "dz", "eps", "mu",
            "precision", "cfl_factor", "dt") if k in d}
        for k in ("nx", "ny", "nz"):
            known[k] = int(known[k])
        return cls(**known)


def cfl_limit(params) -> float:
    """Largest stable time step: 1 / (c * sqrt(1/dx^2 + 1/dy^2 + 1/dz^2)).

    c = 1/sqrt(eps*mu).  Works on anything exposing dx, dy, dz, eps, mu so it
    can run before a SimParams is fully constructed.
    """
    _check_positive(dx=params.dx, dy=params.dy, dz=params.dz,
                    eps=params.eps, mu=params.mu)
    c = 1.0 / math.sqrt(params.eps * params.mu)
    return 1.0 / (c * math.sqrt(
        1.0 / params.dx ** 2 + 1.0 / params.dy ** 2 + 1.0 / params.dz ** 2))
