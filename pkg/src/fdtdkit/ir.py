"""Structured-op intermediate representation for the stepping program.

A step program is an SSA sequence of ops over tensor values: six curl
updates (one per field component), a placeholder H edge pass, and twelve
tangential-E face zeroing ops, mirroring the classic leapfrog structure
(H first, then E).  Every curl op carries an iteration domain, constant
offset access patterns, and an accumulate payload of the fixed shape

    out += coef * ((t1a - t1b) * inv_a - (t2a - t2b) * inv_b)

with reciprocal spacings premultiplied (division never appears in a loop
body).  All loop iterators are parallel: no curl op has a cross-iteration
dependence, which is what makes tiling, fusion, and vectorization plain
iteration-space reorderings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .params import SimParams

READ = "read"
WRITE = "write"

FACES = ("xlo", "xhi", "ylo", "yhi", "zlo", "zhi")


@dataclass(frozen=True)
class TensorValue:
    """One SSA value: defined exactly once, shape fixed at creation."""

    id: str
    shape: tuple
    elem: str
    origin: str   # "input <component>" or "op <op id>"
    root: str     # program-input id whose storage chain this value extends

    def __post_init__(self):
        if any(s < 1 for s in self.shape):
            raise ValidationError(
                "tensor %s has a non-positive extent: %s" % (self.id, self.shape))


@dataclass(frozen=True)
class Access:
    """Constant-offset access: index = iteration point + offsets."""

    value: str
    offsets: tuple
    role: str

    def __str__(self):
        return "%%%s@(%s)" % (self.value, ",".join(str(o) for o in self.offsets))


@dataclass(frozen=True)
class Const:
    value: float
    label: str = ""

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Ref:
    """Payload leaf reading one declared access."""

    access: Access

    def __str__(self):
        return str(self.access)


@dataclass(frozen=True)
class Bin:
    op: str  # add | sub | mul
    lhs: object
    rhs: object

    def __str__(self):
        sym = {"add": "+", "sub": "-", "mul": "*"}[self.op]
        return "(%s %s %s)" % (sym, self.lhs, self.rhs)


@dataclass(frozen=True)
class Accum:
    """Root node: write access receives old value plus the term."""

    old: Ref
    term: object

    def __str__(self):
        return "(+= %s %s)" % (self.old, self.term)


@dataclass(frozen=True)
class CurlStepOp:
    """One structured curl update.

    domain holds the extents of the iteration space and origin its lower
    corner (nonzero for the interior-only E updates).  accesses list the
    write (offsets all zero), the read-modify-write read of the previous
    tensor version, then the four stencil reads t1a, t1b, t2a, t2b.
    """

    id: str
    domain: tuple
    origin: tuple
    write: Access
    rmw: Access
    t1a: Access
    t1b: Access
    t2a: Access
    t2b: Access
    coef: Const
    inv_a: Const
    inv_b: Const

    @property
    def iterators(self):
        return ("parallel",) * len(self.domain)

    @property
    def accesses(self):
        return (self.write, self.rmw, self.t1a, self.t1b, self.t2a, self.t2b)

    @property
    def reads(self):
        return (self.rmw, self.t1a, self.t1b, self.t2a, self.t2b)

    @property
    def payload(self):
        t1 = Bin("sub", Ref(self.t1a), Ref(self.t1b))
        t2 = Bin("sub", Ref(self.t2a), Ref(self.t2b))
        term = Bin("mul", self.coef,
                   Bin("sub", Bin("mul", t1, self.inv_a),
                       Bin("mul", t2, self.inv_b)))
        return Accum(Ref(self.rmw), term)

    def kind(self):
        return "curl_h" if self.write.value.startswith("h") else "curl_e"


@dataclass(frozen=True)
class BoundaryOp:
    """Zero one tangential E component on one outer face (2D domain).

    face=None marks the H edge placeholder: the conducting walls need no H
    correction, but the op slot stays so the program keeps the canonical
    step structure.
    """

    id: str
    face: str | None
    component: str | None
    domain: tuple
    in_value: str | None
    out_value: str | None

    def kind(self):
        return "boundary"

    @property
    def iterators(self):
        return ("parallel",) * len(self.domain)


@dataclass
class StepProgram:
    params: SimParams
    values: dict            # id -> TensorValue, insertion-ordered
    ops: list               # CurlStepOp | BoundaryOp in execution order
    inputs: dict            # component -> input value id
    outputs: dict           # component -> final value id

    def op(self, op_id):
        for o in self.ops:
            if o.id == op_id:
                return o
        raise ValidationError("no op named %r in program" % (op_id,))


# Stencil geometry per curl component: (output, t1 tensor, t1a, t1b,
# t2 tensor, t2a, t2b, inv_a spacing axis, inv_b spacing axis).
_CURL_FORMS = {
    "curl_hx": ("hx", "ey", (0, 0, 1), (0, 0, 0), "ez", (0, 1, 0), (0, 0, 0), "dz", "dy"),
    "curl_hy": ("hy", "ez", (1, 0, 0), (0, 0, 0), "ex", (0, 0, 1), (0, 0, 0), "dx", "dz"),
    "curl_hz": ("hz", "ex", (0, 1, 0), (0, 0, 0), "ey", (1, 0, 0), (0, 0, 0), "dy", "dx"),
    "curl_ex": ("ex", "hz", (0, 0, 0), (0, -1, 0), "hy", (0, 0, 0), (0, 0, -1), "dy", "dz"),
    "curl_ey": ("ey", "hx", (0, 0, 0), (0, 0, -1), "hz", (0, 0, 0), (-1, 0, 0), "dz", "dx"),
    "curl_ez": ("ez", "hy", (0, 0, 0), (-1, 0, 0), "hx", (0, 0, 0), (0, -1, 0), "dx", "dy"),
}

# E-boundary ops in program order: lo/hi pairs per zeroed component so
# same-shape siblings sit next to each other.  (face, component)
_BOUNDARY_ORDER = (
    ("xlo", "ey"), ("xhi", "ey"), ("xlo", "ez"), ("xhi", "ez"),
    ("ylo", "ex"), ("yhi", "ex"), ("ylo", "ez"), ("yhi", "ez"),
    ("zlo", "ex"), ("zhi", "ex"), ("zlo", "ey"), ("zhi", "ey"),
)


def face_axis(face):
    return {"x": 0, "y": 1, "z": 2}[face[0]]


def face_domain(params, face, component):
    """2D extents of a face slice of one component."""
    shape = params.shape(component)
    axis = face_axis(face)
    return tuple(s for i, s in enumerate(shape) if i != axis)


def domain_from_accesses(accesses, shapes):
    """Origin and extents making every access in-bounds.

    Per axis: origin = max over accesses of (-offset) clamped at 0, and the
    upper bound = min over accesses of (shape - positive offset); raises when
    any extent comes out empty.
    """
    ndim = len(next(iter(accesses)).offsets)
    origin = [0] * ndim
    upper = [None] * ndim
    for acc in accesses:
        shape = shapes[acc.value]
        for ax in range(ndim):
            off = acc.offsets[ax]
            origin[ax] = max(origin[ax], -off)
            hi = shape[ax] - max(0, off)
            upper[ax] = hi if upper[ax] is None else min(upper[ax], hi)
    extents = tuple(u - o for u, o in zip(upper, origin))
    for ax, e in enumerate(extents):
        if e <= 0:
            raise ValidationError(
                "empty iteration domain on axis %d (extent %d)" % (ax, e))
    return tuple(origin), extents


def iteration_domain(op: CurlStepOp, program: StepProgram) -> tuple:
    """Extents for which every access stays in-bounds (recomputed, not the
    stored ones)."""
    shapes = {vid: v.shape for vid, v in program.values.items()}
    _, extents = domain_from_accesses(op.accesses, shapes)
    return extents


def build_step_program(params: SimParams) -> StepProgram:
    """The canonical program: curl H x3, H edge placeholder, curl E x3,
    tangential E zeroed on all six faces."""
    values = {}
    versions = {}

    def define(vid, shape, origin, root):
        values[vid] = TensorValue(vid, tuple(int(s) for s in shape),
                                  params.precision, origin, root)

    def fresh(component):
        versions[component] += 1
        return "%s%d" % (component, versions[component])

    inputs = {}
    for comp in ("ex", "ey", "ez", "hx", "hy", "hz"):
        vid = comp + "0"
        define(vid, params.shape(comp), "input " + comp, vid)
        inputs[comp] = vid
        versions[comp] = 0

    current = dict(inputs)
    dt = params.dt
    coef_h = Const(dt / params.mu, "dt/mu")
    coef_e = Const(dt / params.eps, "dt/eps")
    inv = {"dx": Const(1.0 / params.dx, "1/dx"),
           "dy": Const(1.0 / params.dy, "1/dy"),
           "dz": Const(1.0 / params.dz, "1/dz")}

    ops = []
    shapes = {vid: v.shape for vid, v in values.items()}

    def add_curl(name):
        out, t1, a1, b1, t2, a2, b2, sa, sb = _CURL_FORMS[name]
        old = current[out]
        new = fresh(out)
        write = Access(new, (0, 0, 0), WRITE)
        rmw = Access(old, (0, 0, 0), READ)
        acc = (write, rmw,
               Access(current[t1], a1, READ), Access(current[t1], b1, READ),
               Access(current[t2], a2, READ), Access(current[t2], b2, READ))
        define(new, params.shape(out), "op " + name, out + "0")
        shapes[new] = params.shape(out)
        origin, extents = domain_from_accesses(acc, shapes)
        coef = coef_h if out.startswith("h") else coef_e
        ops.append(CurlStepOp(name, extents, origin, *acc, coef, inv[sa], inv[sb]))
        current[out] = new

    for name in ("curl_hx", "curl_hy", "curl_hz"):
        add_curl(name)

    ops.append(BoundaryOp("bnd_h", None, None, (), None, None))

    for name in ("curl_ex", "curl_ey", "curl_ez"):
        add_curl(name)

    for face, comp in _BOUNDARY_ORDER:
        old = current[comp]
        new = fresh(comp)
        define(new, params.shape(comp), "op bnd_%s_%s" % (face, comp), comp + "0")
        ops.append(BoundaryOp("bnd_%s_%s" % (face, comp), face, comp,
                              face_domain(params, face, comp), old, new))
        current[comp] = new

    outputs = dict(current)
    return StepProgram(params, values, ops, inputs, outputs)


def verify(program: StepProgram) -> list:
    """Check SSA discipline, bounds, and step ordering.

    Returns a list of diagnostic strings; empty means the program is well
    formed.  Every violation names the op and axis involved.
    """
    diags = []
    defined = set()
    definers = {}

    for vid, v in program.values.items():
        if v.origin.startswith("input"):
            defined.add(vid)

    for v in program.values.values():
        if any(s < 1 for s in v.shape):
            diags.append("tensor %s: non-positive extent in shape %s"
                         % (v.id, v.shape))

    last_h = None
    first_e = None
    for idx, op in enumerate(program.ops):
        if isinstance(op, CurlStepOp):
            if op.kind() == "curl_h":
                last_h = idx
            elif first_e is None:
                first_e = idx

            writes = [a for a in op.accesses if a.role == WRITE]
            if len(writes) != 1:
                diags.append("op %s: expected exactly one write access, got %d"
                             % (op.id, len(writes)))
            for w in writes:
                if any(o != 0 for o in w.offsets):
                    diags.append("op %s: write offsets must be zero, got %s"
                                 % (op.id, w.offsets))

            for acc in op.reads:
                if acc.value not in program.values:
                    diags.append("op %s: read of unknown tensor %s" % (op.id, acc.value))
                    continue
                if acc.value not in defined:
                    diags.append("op %s: read of %s before its definition"
                                 % (op.id, acc.value))

            # In-bounds over the full domain, checked analytically per axis.
            for acc in op.accesses:
                if acc.value not in program.values:
                    continue
                shape = program.values[acc.value].shape
                for ax in range(3):
                    lo = op.origin[ax] + acc.offsets[ax]
                    hi = op.origin[ax] + op.domain[ax] - 1 + acc.offsets[ax]
                    if lo < 0 or hi >= shape[ax]:
                        diags.append(
                            "op %s: out-of-bounds %s of %s on axis %d "
                            "(indices [%d,%d] vs extent %d)"
                            % (op.id, acc.role, acc.value, ax, lo, hi, shape[ax]))

            for ax, e in enumerate(op.domain):
                if e <= 0:
                    diags.append("op %s: empty domain on axis %d" % (op.id, ax))

            out = op.write.value
            if out in defined:
                diags.append("value %s defined more than once (op %s)" % (out, op.id))
            definers[out] = op.id
            defined.add(out)
        else:
            if op.in_value is not None:
                if op.in_value not in defined:
                    diags.append("op %s: read of %s before its definition"
                                 % (op.id, op.in_value))
                out = op.out_value
                if out in defined:
                    diags.append("value %s defined more than once (op %s)"
                                 % (out, op.id))
                defined.add(out)

    if last_h is not None and first_e is not None and first_e < last_h:
        diags.append("op %s: E update precedes an H update (H must come first)"
                     % (program.ops[first_e].id,))

    return diags


def program_text(program: StepProgram) -> str:
    """Deterministic textual dump, one op per line, payload in prefix
    notation.  Golden-file stable: value order is insertion order and all
    constants print with full round-trip precision."""
    p = program.params
    lines = ["program nx=%d ny=%d nz=%d precision=%s dt=%r"
             % (p.nx, p.ny, p.nz, p.precision, p.dt)]
    lines.append("values:")
    for v in program.values.values():
        lines.append("  %%%s = %s shape=(%s) %s"
                     % (v.id, v.origin, ",".join(str(s) for s in v.shape), v.elem))
    lines.append("ops:")
    for op in program.ops:
        if isinstance(op, CurlStepOp):
            ranges = ",".join("%d:%d" % (o, o + e)
                              for o, e in zip(op.origin, op.domain))
            acc = " ".join(("w " if a.role == WRITE else "r ") + str(a)
                           for a in op.accesses)
            lines.append("  %%%s: domain=[%s] %s payload=%s"
                         % (op.id, ranges, acc, op.payload))
        elif op.face is None:
            lines.append("  %%%s: h-edge placeholder (no-op)" % op.id)
        else:
            lines.append("  %%%s: face=%s zero %s %%%s -> %%%s domain=(%s)"
                         % (op.id, op.face, op.component, op.in_value,
                            op.out_value,
                            ",".join(str(s) for s in op.domain)))
    return "\n".join(lines) + "\n"


def eval_payload(op: CurlStepOp, arrays: dict, point: tuple, dtype) -> object:
    """Evaluate the payload tree at one iteration point.

    arrays maps value ids to ndarrays.  Arithmetic runs in the given dtype
    with per-operation rounding (numpy scalars), so f32 evaluation matches
    the compiled kernels bit for bit.
    """
    dt = np.dtype(dtype).type

    def at(access):
        idx = tuple(p + o for p, o in zip(point, access.offsets))
        return arrays[access.value][idx]

    def ev(node):
        if isinstance(node, Const):
            return dt(node.value)
        if isinstance(node, Ref):
            return at(node.access)
        if isinstance(node, Bin):
            a, b = ev(node.lhs), ev(node.rhs)
            if node.op == "add":
                return dt(a + b)
            if node.op == "sub":
                return dt(a - b)
            return dt(a * b)
        raise ValidationError("unknown payload node %r" % (node,))

    root = op.payload
    return dt(ev(root.old) + ev(root.term))
