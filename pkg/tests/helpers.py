"""Independent reference routes for the tests.

Two steppers that share nothing with the package's execution path:
a numpy-slice implementation and a pure-Python triple-loop one.  Both keep
the engine's arithmetic contract (reciprocals premultiplied, update H before
E, conducting walls zeroed) so results are bit-comparable in each precision.
"""

import itertools

import numpy as np

from fdtdkit import SimParams
from fdtdkit.fields import FieldSet
from fdtdkit.ir import (Access, Const, CurlStepOp, READ, StepProgram,
                        TensorValue, WRITE, eval_payload, verify)

# the acceptance tests append their [PASS]/[FAIL] lines here; the conftest
# terminal-summary hook echoes them after the run
ACCEPTANCE_LINES = []


def _coefs(params):
    dt_e = params.dtype(np.float64(params.dt) / np.float64(params.eps))
    dt_h = params.dtype(np.float64(params.dt) / np.float64(params.mu))
    rx = params.dtype(1.0 / np.float64(params.dx))
    ry = params.dtype(1.0 / np.float64(params.dy))
    rz = params.dtype(1.0 / np.float64(params.dz))
    return dt_e, dt_h, rx, ry, rz


def numpy_slice_step(fields: FieldSet):
    """One leapfrog step via array slicing."""
    p = fields.params
    ex, ey, ez = fields.ex, fields.ey, fields.ez
    hx, hy, hz = fields.hx, fields.hy, fields.hz
    ce, cm, rx, ry, rz = _coefs(p)

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

    for arr, axis in ((ey, 0), (ez, 0), (ex, 1), (ez, 1), (ex, 2), (ey, 2)):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = 0
        hi[axis] = arr.shape[axis] - 1
        arr[tuple(lo)] = 0
        arr[tuple(hi)] = 0


def python_loop_step(fields: FieldSet):
    """One leapfrog step with explicit Python loops; tiny grids only."""
    p = fields.params
    nx, ny, nz = p.nx, p.ny, p.nz
    ex, ey, ez = fields.ex, fields.ey, fields.ez
    hx, hy, hz = fields.hx, fields.hy, fields.hz
    ce, cm, rx, ry, rz = _coefs(p)
    t = p.dtype

    for i in range(nx + 1):
        for j in range(ny):
            for k in range(nz):
                hx[i, j, k] += cm * t(t(t(ey[i, j, k + 1] - ey[i, j, k]) * rz)
                                      - t(t(ez[i, j + 1, k] - ez[i, j, k]) * ry))
    for i in range(nx):
        for j in range(ny + 1):
            for k in range(nz):
                hy[i, j, k] += cm * t(t(t(ez[i + 1, j, k] - ez[i, j, k]) * rx)
                                      - t(t(ex[i, j, k + 1] - ex[i, j, k]) * rz))
    for i in range(nx):
        for j in range(ny):
            for k in range(nz + 1):
                hz[i, j, k] += cm * t(t(t(ex[i, j + 1, k] - ex[i, j, k]) * ry)
                                      - t(t(ey[i + 1, j, k] - ey[i, j, k]) * rx))

    for i in range(nx):
        for j in range(1, ny):
            for k in range(1, nz):
                ex[i, j, k] += ce * t(t(t(hz[i, j, k] - hz[i, j - 1, k]) * ry)
                                      - t(t(hy[i, j, k] - hy[i, j, k - 1]) * rz))
    for i in range(1, nx):
        for j in range(ny):
            for k in range(1, nz):
                ey[i, j, k] += ce * t(t(t(hx[i, j, k] - hx[i, j, k - 1]) * rz)
                                      - t(t(hz[i, j, k] - hz[i - 1, j, k]) * rx))
    for i in range(1, nx):
        for j in range(1, ny):
            for k in range(nz):
                ez[i, j, k] += ce * t(t(t(hy[i, j, k] - hy[i - 1, j, k]) * rx)
                                      - t(t(hx[i, j, k] - hx[i, j - 1, k]) * ry))
    # walls already untouched: loops above skip tangential boundary entries


def synthetic_program(conflict_between, late_reader=False):
    """Three same-shape ops A, C, B; A and B independent.

    With conflict_between, C rewrites the hq chain that A reads, so moving
    A's loop down past C is illegal; otherwise C works its own hm chain and
    merely shares reads with A.  With late_reader, B also reads the old hq0
    after C redefined it, which forces hq1 into a fresh buffer.  All writes
    are h-named so the verifier's H/E ordering rule stays satisfied.
    """
    shape = (4, 4, 4)
    params = SimParams(nx=4, ny=4, nz=4, eps=1.0, mu=1.0)
    values = {}
    for vid in ("ha0", "hb0", "hq0", "hm0"):
        values[vid] = TensorValue(vid, shape, "f64", "input " + vid[:2], vid)
    values["ha1"] = TensorValue("ha1", shape, "f64", "op A", "ha0")
    values["hb1"] = TensorValue("hb1", shape, "f64", "op B", "hb0")
    if conflict_between:
        values["hq1"] = TensorValue("hq1", shape, "f64", "op C", "hq0")
    else:
        values["hm1"] = TensorValue("hm1", shape, "f64", "op C", "hm0")

    def curl(op_id, out_new, out_old, src, src2):
        return CurlStepOp(
            op_id, (4, 4, 3), (0, 0, 0),
            Access(out_new, (0, 0, 0), WRITE), Access(out_old, (0, 0, 0), READ),
            Access(src, (0, 0, 1), READ), Access(src, (0, 0, 0), READ),
            Access(src2, (0, 0, 1), READ), Access(src2, (0, 0, 0), READ),
            Const(0.5), Const(1.0), Const(1.0))

    a = curl("A", "ha1", "ha0", "hq0", "ha0")
    if conflict_between:
        c = curl("C", "hq1", "hq0", "hm0", "hq0")
    else:
        c = curl("C", "hm1", "hm0", "hq0", "hm0")
    b = curl("B", "hb1", "hb0", "hq0" if late_reader else "hm0", "hb0")
    inputs = {v: v for v in ("ha0", "hb0", "hq0", "hm0")}
    outputs = {"ha0": "ha1", "hb0": "hb1"}
    return StepProgram(params, values, [a, c, b], inputs, outputs)


def brute_cells(op, program):
    """Literal per-root read/write cell sets over the op's full domain."""
    out = {}

    def add(root, role, cell):
        out.setdefault(root, {"r": set(), "w": set()})[role].add(cell)

    if isinstance(op, CurlStepOp):
        rng = [range(o, o + e) for o, e in zip(op.origin, op.domain)]
        for point in itertools.product(*rng):
            for acc in op.accesses:
                cell = tuple(q + o for q, o in zip(point, acc.offsets))
                root = program.values[acc.value].root
                add(root, "w" if acc.role == WRITE else "r", cell)
    elif op.face is not None:
        shape = program.values[op.out_value].shape
        root = program.values[op.out_value].root
        ax = {"x": 0, "y": 1, "z": 2}[op.face[0]]
        fixed = 0 if op.face.endswith("lo") else shape[ax] - 1
        spans = [range(s) for s in shape]
        spans[ax] = range(fixed, fixed + 1)
        for cell in itertools.product(*spans):
            add(root, "w", cell)
    return out


def brute_conflict(op_a, op_b, program):
    fa, fb = brute_cells(op_a, program), brute_cells(op_b, program)
    for root in fa:
        if root not in fb:
            continue
        if (fa[root]["w"] & (fb[root]["r"] | fb[root]["w"])
                or fa[root]["r"] & fb[root]["w"]):
            return True
    return False


def interp_copy_on_write(program, seed=77):
    """Every op materializes its output value; nothing is overwritten."""
    t = program.params.dtype
    rng = np.random.default_rng(seed)
    arrays = {}
    for vid, v in program.values.items():
        if v.origin.startswith("input"):
            arrays[vid] = rng.uniform(-1, 1, v.shape).astype(t)
    for op in program.ops:
        if isinstance(op, CurlStepOp):
            out = arrays[op.rmw.value].copy()
            rngs = [range(o, o + e) for o, e in zip(op.origin, op.domain)]
            for point in itertools.product(*rngs):
                out[point] = eval_payload(op, arrays, point, t)
            arrays[op.write.value] = out
        elif op.face is not None:
            out = arrays[op.in_value].copy()
            ax = {"x": 0, "y": 1, "z": 2}[op.face[0]]
            sl = [slice(None)] * 3
            sl[ax] = 0 if op.face.endswith("lo") else out.shape[ax] - 1
            out[tuple(sl)] = 0
            arrays[op.out_value] = out
    return arrays


def interp_inplace(program, plan, seed=77):
    """Execute through the buffer plan, mutating shared storage."""
    t = program.params.dtype
    rng = np.random.default_rng(seed)
    bufs = {}
    for vid, v in program.values.items():
        if v.origin.startswith("input"):
            bufs[plan[vid]] = rng.uniform(-1, 1, v.shape).astype(t)

    def arrays_view():
        return {vid: bufs[plan[vid]] for vid in plan if plan[vid] in bufs}

    for op in program.ops:
        if isinstance(op, CurlStepOp):
            old, new = op.rmw.value, op.write.value
            if plan[new] not in bufs:            # copy-on-write fallback
                bufs[plan[new]] = bufs[plan[old]].copy()
            target = bufs[plan[new]]
            view = arrays_view()
            rngs = [range(o, o + e) for o, e in zip(op.origin, op.domain)]
            updates = {}
            for point in itertools.product(*rngs):
                updates[point] = eval_payload(op, view, point, t)
            for point, val in updates.items():
                target[point] = val
        elif op.face is not None:
            old, new = op.in_value, op.out_value
            if plan[new] not in bufs:
                bufs[plan[new]] = bufs[plan[old]].copy()
            arr = bufs[plan[new]]
            ax = {"x": 0, "y": 1, "z": 2}[op.face[0]]
            sl = [slice(None)] * 3
            sl[ax] = 0 if op.face.endswith("lo") else arr.shape[ax] - 1
            arr[tuple(sl)] = 0
    return bufs


def _random_op(rng, op_id, values, latest, shape, chains, versioned):
    """One random curl-form op: advances a chain, reads two random sources.

    With versioned, source reads may hit any PAST version of a chain (the
    case that forces copy-on-write buffers); otherwise they read version 0.
    """
    c = chains[int(rng.integers(0, len(chains)))]
    old = latest[c]
    ver = int(old[len(c):]) + 1
    new = "%s%d" % (c, ver)

    def source():
        d = chains[int(rng.integers(0, len(chains)))]
        if versioned:
            v = int(rng.integers(0, int(latest[d][len(d):]) + 1))
        else:
            v = 0
        return "%s%d" % (d, v)

    u, v_ax = rng.choice(3, size=2, replace=False)
    t1, t2 = source(), source()
    off_u = [0, 0, 0]
    off_u[u] = 1
    off_v = [0, 0, 0]
    off_v[v_ax] = 1
    origin = [int(rng.integers(0, 2)) for _ in range(3)]
    ext = []
    for ax in range(3):
        room = shape[ax] - origin[ax] - max(off_u[ax], off_v[ax])
        ext.append(int(rng.integers(1, room + 1)))
    values[new] = TensorValue(new, shape, "f64", "op " + op_id, c + "0")
    latest[c] = new
    return CurlStepOp(
        op_id, tuple(ext), tuple(origin),
        Access(new, (0, 0, 0), WRITE), Access(old, (0, 0, 0), READ),
        Access(t1, tuple(off_u), READ), Access(t1, (0, 0, 0), READ),
        Access(t2, tuple(off_v), READ), Access(t2, (0, 0, 0), READ),
        Const(0.5), Const(1.0), Const(1.0))


def random_chain_program(rng, versioned=True, max_ops=6):
    """Random verify-clean program over 2-4 h-named chains of 3^3 arrays."""
    shape = (3, 3, 3)
    params = SimParams(nx=3, ny=3, nz=3, eps=1.0, mu=1.0)
    n_chains = int(rng.integers(2, 5))
    chains = ["h" + chr(ord("a") + i) for i in range(n_chains)]
    values = {}
    latest = {}
    for c in chains:
        values[c + "0"] = TensorValue(c + "0", shape, "f64", "input " + c,
                                      c + "0")
        latest[c] = c + "0"
    ops = []
    for idx in range(int(rng.integers(2, max_ops + 1))):
        ops.append(_random_op(rng, "op%d" % idx, values, latest, shape,
                              chains, versioned))
    inputs = {c + "0": c + "0" for c in chains}
    outputs = {c: latest[c] for c in chains}
    program = StepProgram(params, values, ops, inputs, outputs)
    problems = verify(program)
    assert problems == [], problems
    return program


def fields_equal_bits(a: FieldSet, b: FieldSet) -> bool:
    """Bitwise equality of all six components (the 0-ULP check)."""
    return all(a.component(c).tobytes() == b.component(c).tobytes()
               for c in ("ex", "ey", "ez", "hx", "hy", "hz"))


def worst_component_ulp(a: FieldSet, b: FieldSet):
    """(component, max ULP distance) for failure diagnostics."""
    from fdtdkit.fieldio import ulp_distance
    worst = ("", 0)
    for c in ("ex", "ey", "ez", "hx", "hy", "hz"):
        d = int(ulp_distance(a.component(c), b.component(c)).max())
        if d >= worst[1]:
            worst = (c, d)
    return worst
