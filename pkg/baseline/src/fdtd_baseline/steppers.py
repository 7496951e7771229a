"""Reference FDTD steppers: NumPy slicing and naive Python loops.

Both advance the same staggered arrays with the same arithmetic as the
companion engine: update H from the E curls, then E from the H curls,
multiply by premultiplied reciprocal spacings, and pin wall-tangential E
to exact zero (perfectly conducting walls).  The slice form exists to be
fast for NumPy; the loop form spells out the triple loops it replaces and
is only usable on small grids.
"""

from __future__ import annotations

import numpy as np

from .grids import COMPONENTS, GridSpec, ValidationError

STEPPERS = ("slice", "naive")


def coefficients(grid: GridSpec):
    """(dt/eps, dt/mu, 1/dx, 1/dy, 1/dz) evaluated in f64, stored as the
    grid dtype; matches the engine's constant preparation bit for bit."""
    t = grid.dtype
    dt_e = t(np.float64(grid.dt) / np.float64(grid.eps))
    dt_h = t(np.float64(grid.dt) / np.float64(grid.mu))
    rx = t(1.0 / np.float64(grid.dx))
    ry = t(1.0 / np.float64(grid.dy))
    rz = t(1.0 / np.float64(grid.dz))
    return dt_e, dt_h, rx, ry, rz


def check_fields(fields: dict, grid: GridSpec):
    """Shape/dtype validation shared by both steppers."""
    for comp in COMPONENTS:
        if comp not in fields:
            raise ValidationError("missing field component %r" % (comp,))
        arr = fields[comp]
        if arr.shape != grid.shape(comp):
            raise ValidationError(
                "%s has shape %s; the grid needs %s"
                % (comp, arr.shape, grid.shape(comp)))
        if arr.dtype != grid.dtype:
            raise ValidationError(
                "%s has dtype %s; the grid needs %s"
                % (comp, arr.dtype, np.dtype(grid.dtype)))


def _zero_tangential_e(ex, ey, ez):
    # Conducting walls: each E component is tangential to the four faces
    # it does not point through.
    for arr, axis in ((ey, 0), (ez, 0), (ex, 1), (ez, 1), (ex, 2), (ey, 2)):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = 0
        hi[axis] = arr.shape[axis] - 1
        arr[tuple(lo)] = 0
        arr[tuple(hi)] = 0


def slice_step(fields: dict, grid: GridSpec):
    """One leapfrog step via whole-array slicing."""
    ex, ey, ez = fields["ex"], fields["ey"], fields["ez"]
    hx, hy, hz = fields["hx"], fields["hy"], fields["hz"]
    ce, cm, rx, ry, rz = coefficients(grid)

    hx += cm * ((ey[:, :, 1:] - ey[:, :, :-1]) * rz
                - (ez[:, 1:, :] - ez[:, :-1, :]) * ry)
    hy += cm * ((ez[1:, :, :] - ez[:-1, :, :]) * rx
                - (ex[:, :, 1:] - ex[:, :, :-1]) * rz)
    hz += cm * ((ex[:, 1:, :] - ex[:, :-1, :]) * ry
                - (ey[1:, :, :] - ey[:-1, :, :]) * rx)

    ex[:, 1:-1, 1:-1] += ce * ((hz[:, 1:, 1:-1] - hz[:, :-1, 1:-1]) * ry
                               - (hy[:, 1:-1, 1:] - hy[:, 1:-1, :-1]) * rz)
    ey[1:-1, :, 1:-1] += ce * ((hx[1:-1, :, 1:] - hx[1:-1, :, :-1]) * rz
                               - (hz[1:, :, 1:-1] - hz[:-1, :, 1:-1]) * rx)
    ez[1:-1, 1:-1, :] += ce * ((hy[1:, 1:-1, :] - hy[:-1, 1:-1, :]) * rx
                               - (hx[1:-1, 1:, :] - hx[1:-1, :-1, :]) * ry)

    _zero_tangential_e(ex, ey, ez)


def loop_step(fields: dict, grid: GridSpec):
    """One leapfrog step with explicit Python triple loops.

    Element order and rounding match slice_step (scalar ops on the array
    dtype round at every subexpression exactly like the sliced form), so
    the two routes agree bitwise; this one is simply thousands of times
    slower and exists as the pre-vectorization comparison point.
    """
    nx, ny, nz = grid.nx, grid.ny, grid.nz
    ex, ey, ez = fields["ex"], fields["ey"], fields["ez"]
    hx, hy, hz = fields["hx"], fields["hy"], fields["hz"]
    ce, cm, rx, ry, rz = coefficients(grid)

    for i in range(nx + 1):
        for j in range(ny):
            for k in range(nz):
                hx[i, j, k] += cm * ((ey[i, j, k + 1] - ey[i, j, k]) * rz
                                     - (ez[i, j + 1, k] - ez[i, j, k]) * ry)
    for i in range(nx):
        for j in range(ny + 1):
            for k in range(nz):
                hy[i, j, k] += cm * ((ez[i + 1, j, k] - ez[i, j, k]) * rx
                                     - (ex[i, j, k + 1] - ex[i, j, k]) * rz)
    for i in range(nx):
        for j in range(ny):
            for k in range(nz + 1):
                hz[i, j, k] += cm * ((ex[i, j + 1, k] - ex[i, j, k]) * ry
                                     - (ey[i + 1, j, k] - ey[i, j, k]) * rx)

    for i in range(nx):
        for j in range(1, ny):
            for k in range(1, nz):
                ex[i, j, k] += ce * ((hz[i, j, k] - hz[i, j - 1, k]) * ry
                                     - (hy[i, j, k] - hy[i, j, k - 1]) * rz)
    for i in range(1, nx):
        for j in range(ny):
            for k in range(1, nz):
                ey[i, j, k] += ce * ((hx[i, j, k] - hx[i, j, k - 1]) * rz
                                     - (hz[i, j, k] - hz[i - 1, j, k]) * rx)
    for i in range(1, nx):
        for j in range(1, ny):
            for k in range(nz):
                ez[i, j, k] += ce * ((hy[i, j, k] - hy[i - 1, j, k]) * rx
                                     - (hx[i, j, k] - hx[i, j - 1, k]) * ry)

    _zero_tangential_e(ex, ey, ez)


def get_stepper(name: str):
    if name == "slice":
        return slice_step
    if name == "naive":
        return loop_step
    raise ValidationError(
        "stepper must be one of %s, got %r" % (list(STEPPERS), name))
