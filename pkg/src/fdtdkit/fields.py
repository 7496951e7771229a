"""Field storage, initial conditions, and physics diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .params import COMPONENTS, SimParams

# Interior slices per E component: everything except entries that are
# tangential to an outer face (those are pinned to 0 by the conducting walls).
_E_INTERIOR = {
    "ex": (slice(None), slice(1, -1), slice(1, -1)),
    "ey": (slice(1, -1), slice(None), slice(1, -1)),
    "ez": (slice(1, -1), slice(1, -1), slice(None)),
}


@dataclass
class FieldSet:
    """The six staggered field arrays plus the grid they live on."""

    params: SimParams
    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    hz: np.ndarray

    def component(self, name):
        if name not in COMPONENTS:
            raise ValidationError("unknown field component %r" % (name,))
        return getattr(self, name)

    def copy(self):
        return FieldSet(self.params, *(self.component(c).copy() for c in COMPONENTS))

    def allclose_shapes(self):
        return all(self.component(c).shape == self.params.shape(c) for c in COMPONENTS)


@dataclass(frozen=True)
class InitialCondition:
    """zero, random_interior, or mode(m,n,p).

    random_interior draws uniform values in [-amplitude, amplitude] for the
    interior E entries from PCG64 seeded with SeedSequence(seed); wall
    tangential E stays exactly 0.  mode(m,n,p) samples
    Ez = amplitude * sin(m pi x/Lx) * sin(n pi y/Ly) * cos(p pi z/Lz) at the
    Ez node positions, with the tangential walls forced to exact zero.
    """

    kind: str = "zero"
    seed: int | None = None
    amplitude: float = 1.0
    m: int = 1
    n: int = 1
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("zero", "random_interior", "mode"):
            raise ValidationError(
                "init kind must be zero, random_interior, or mode, got %r"
                % (self.kind,))
        if self.kind == "random_interior" and self.seed is None:
            raise ValidationError("random_interior requires a seed")
        if self.kind == "mode":
            if self.m < 1 or self.n < 1 or self.p < 0:
                raise ValidationError(
                    "mode indices need m,n >= 1 and p >= 0, got (%d,%d,%d)"
                    % (self.m, self.n, self.p))
        if not (self.amplitude > 0):
            raise ValidationError("amplitude must be > 0")

    @classmethod
    def parse(cls, text, seed=None, amplitude=1.0):
        """Parse a CLI-style spec: 'zero', 'random', or 'mode:m,n,p'."""
        if text == "zero":
            return cls("zero", amplitude=amplitude)
        if text in ("random", "random_interior"):
            return cls("random_interior", seed=seed, amplitude=amplitude)
        if text.startswith("mode:"):
            try:
                m, n, p = (int(v) for v in text[5:].split(","))
            except ValueError:
                raise ValidationError(
                    "mode init must look like mode:m,n,p, got %r" % (text,))
            return cls("mode", amplitude=amplitude, m=m, n=n, p=p)
        raise ValidationError("unknown init spec %r" % (text,))


def make_fields(params: SimParams, init: InitialCondition | None = None) -> FieldSet:
    """Allocate the staggered arrays and apply the initial condition."""
    init = init or InitialCondition()
    arrays = {}
    for name in COMPONENTS:
        shape = params.shape(name)
        cells = int(np.prod([int(s) for s in shape], dtype=object))
        if cells * params.dtype().itemsize > 2 ** 62:
            raise ValidationError(
                "allocation for %s with shape %s overflows" % (name, shape))
        arrays[name] = np.zeros(shape, dtype=params.dtype)

    if init.kind == "random_interior":
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(init.seed)))
        for name in ("ex", "ey", "ez"):
            sl = _E_INTERIOR[name]
            interior_shape = arrays[name][sl].shape
            values = rng.uniform(-init.amplitude, init.amplitude, size=interior_shape)
            arrays[name][sl] = values.astype(params.dtype)
    elif init.kind == "mode":
        arrays["ez"] = _mode_ez(params, init)

    return FieldSet(params, *(arrays[c] for c in COMPONENTS))


def _mode_ez(params, init):
    """Sinusoidal cavity profile sampled at Ez nodes, computed in f64."""
    nx, ny, nz = params.nx, params.ny, params.nz
    lx, ly, lz = nx * params.dx, ny * params.dy, nz * params.dz
    x = np.arange(nx + 1, dtype=np.float64) * params.dx
    y = np.arange(ny + 1, dtype=np.float64) * params.dy
    z = (np.arange(nz, dtype=np.float64) + 0.5) * params.dz
    profile = (init.amplitude
               * np.sin(init.m * np.pi * x / lx)[:, None, None]
               * np.sin(init.n * np.pi * y / ly)[None, :, None]
               * np.cos(init.p * np.pi * z / lz)[None, None, :])
    ez = profile.astype(params.dtype)
    # sin(m*pi) is ~1e-16 rather than 0 in floating point; the conducting
    # walls must hold exact zeros.
    ez[0, :, :] = 0
    ez[-1, :, :] = 0
    ez[:, 0, :] = 0
    ez[:, -1, :] = 0
    return ez


def energy(fields: FieldSet, params: SimParams | None = None) -> float:
    """Field energy of the stored values: sum(eps/2 |E|^2 + mu/2 |H|^2) dV.

    Sums run in f64 regardless of the storage precision.  No spatial
    interpolation is applied; this is the cheap as-stored diagnostic.
    """
    p = params or fields.params
    dv = p.dx * p.dy * p.dz
    e2 = 0.0
    h2 = 0.0
    for name in ("ex", "ey", "ez"):
        a = fields.component(name).astype(np.float64, copy=False).ravel()
        e2 += float(np.dot(a, a))
    for name in ("hx", "hy", "hz"):
        a = fields.component(name).astype(np.float64, copy=False).ravel()
        h2 += float(np.dot(a, a))
    return 0.5 * dv * (p.eps * e2 + p.mu * h2)


def probe(fields: FieldSet, component: str, i: int, j: int, k: int) -> float:
    """Read one stored value; bounds-checked, no side effects."""
    arr = fields.component(component)
    idx = (i, j, k)
    for axis, (ix, extent) in enumerate(zip(idx, arr.shape)):
        if not (0 <= ix < extent):
            raise ValidationError(
                "probe index %s out of range for %s with shape %s (axis %d)"
                % (idx, component, arr.shape, axis))
    return float(arr[i, j, k])
