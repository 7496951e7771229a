"""Transform pipeline over step programs.

Four directives, applied in script order against a growing loop forest:

  tile %op axis=k size=16      split one domain axis into tiles
  fuse %loopA %loopB           merge two structurally identical tile loops
  plan-inplace                 collapse SSA chains onto per-component buffers
  vectorize %loop width=16     mark a k tile loop lane-parallel
  vectorize %loop scalable     width resolved from the target at run start

Handles: every op id in the program is an op handle.  tile consumes its op
handle and returns a renamed one (%curl_hx -> %curl_hx.1) plus a loop handle
(%loop0, %loop1, ... in creation order); fuse consumes both loop handles and
returns a fresh one.  Using a consumed handle is a script error ("dangling
handle").  plan-inplace appears at most once and before any vectorize; if a
script never names it, it runs implicitly (before the first vectorize, or at
the end).

Fusion legality is re-proved, never trusted: loops must agree on axis and
exact tile partition, the two bodies must be independent at the cell level
(no write of either overlapping a read or write of the other on the same
storage chain), and the earlier loop must move legally past everything
between the two.  All loop iterators are parallel, so these checks are the
entire story; payload trees are never rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScriptError, ValidationError
from .ir import BoundaryOp, CurlStepOp, StepProgram, face_axis

AXIS_NAMES = {"i": 0, "j": 1, "k": 2}


# ---------------------------------------------------------------------------
# Loop forest

@dataclass
class OpBody:
    """Leaf of the forest: one op, executed over its (possibly restricted)
    domain."""

    op_id: str


@dataclass
class TileLoop:
    """One tiling level along a single axis.

    tiles is the exact partition of the op's index range on that axis as
    half-open (start, stop) pairs; the last tile carries the remainder.
    vector is None, an int lane width, or "scalable".
    """

    name: str
    axis: int
    size: int
    tiles: tuple
    body: list
    vector: object = None


def subtree_op_ids(item):
    if isinstance(item, OpBody):
        return [item.op_id]
    ids = []
    for child in item.body:
        ids.extend(subtree_op_ids(child))
    return ids


def tile_partition(lo, hi, size):
    """Half-open tiles covering [lo, hi); the last one holds the remainder."""
    return tuple((s, min(s + size, hi)) for s in range(lo, hi, size))


def vector_iterations(extent, width):
    """How a k range of `extent` executes at lane width `width`:
    (full vector chunks, scalar remainder iterations)."""
    return extent // width, extent % width


# ---------------------------------------------------------------------------
# Cell-level access footprints (shared by the legality checks)

def op_footprint(op, program: StepProgram):
    """Map chain root -> {"r": [boxes], "w": [boxes]} of inclusive index
    boxes this op touches.  Boundary zeroing touches only its face cells."""
    values = program.values
    fp = {}

    def add(root, role, box):
        fp.setdefault(root, {"r": [], "w": []})[role].append(box)

    if isinstance(op, CurlStepOp):
        for acc in op.accesses:
            root = values[acc.value].root
            box = tuple((o + d, o + e - 1 + d)
                        for o, e, d in zip(op.origin, op.domain, acc.offsets))
            add(root, "w" if acc.role == "write" else "r", box)
    elif op.face is not None:
        root = values[op.out_value].root
        shape = values[op.out_value].shape
        ax = face_axis(op.face)
        idx = 0 if op.face.endswith("lo") else shape[ax] - 1
        box = []
        d = 0
        for a in range(3):
            if a == ax:
                box.append((idx, idx))
            else:
                box.append((0, shape[a] - 1))
                d += 1
        add(root, "w", tuple(box))
    return fp


def _boxes_overlap(a, b):
    return all(lo1 <= hi2 and lo2 <= hi1 for (lo1, hi1), (lo2, hi2) in zip(a, b))


def footprint_conflict(fa, fb):
    """First write/read or write/write overlap between two footprints, or
    None when the ops commute."""
    for root in fa:
        if root not in fb:
            continue
        pairs = (("w", "r"), ("w", "w"), ("r", "w"))
        for ra, rb in pairs:
            for ba in fa[root][ra]:
                for bb in fb[root][rb]:
                    if _boxes_overlap(ba, bb):
                        return ("%s %s box %s overlaps %s box %s"
                                % (root, ra, ba, rb, bb))
    return None


def ops_conflict(op_a, op_b, program):
    return footprint_conflict(op_footprint(op_a, program),
                              op_footprint(op_b, program))


# ---------------------------------------------------------------------------
# In-place buffer planning

def plan_inplace(program: StepProgram):
    """Collapse each input-rooted read-modify-write chain onto one buffer.

    Returns (plan, extra): plan maps every tensor value id to a buffer name,
    and extra lists (value id, reason) for values that needed a fresh buffer
    because the version they redefine is still read later (copy-on-write
    fallback).  The canonical step program maps onto exactly the six field
    buffers with no extras.
    """
    readers = {}
    for idx, op in enumerate(program.ops):
        if isinstance(op, CurlStepOp):
            for acc in op.reads:
                readers.setdefault(acc.value, []).append(idx)
        elif op.in_value is not None:
            readers.setdefault(op.in_value, []).append(idx)

    plan = {}
    extra = []
    for vid, v in program.values.items():
        if v.origin.startswith("input"):
            plan[vid] = "buf_" + vid

    for idx, op in enumerate(program.ops):
        if isinstance(op, CurlStepOp):
            old, new = op.rmw.value, op.write.value
        elif op.in_value is not None:
            old, new = op.in_value, op.out_value
        else:
            continue
        later = [r for r in readers.get(old, []) if r > idx]
        if later:
            plan[new] = "buf_extra%d" % len(extra)
            extra.append((new, "%s still read by op %s after its redefinition"
                          % (old, program.ops[later[0]].id)))
        else:
            plan[new] = plan[old]
    return plan, extra


# ---------------------------------------------------------------------------
# Script directives

@dataclass(frozen=True)
class Tile:
    op: str
    axis: str
    size: int
    line: int = 0


@dataclass(frozen=True)
class Fuse:
    a: str
    b: str
    line: int = 0


@dataclass(frozen=True)
class PlanInPlace:
    line: int = 0


@dataclass(frozen=True)
class Vectorize:
    loop: str
    width: int | None = None
    scalable: bool = False
    line: int = 0


@dataclass
class TransformScript:
    directives: list

    def __iter__(self):
        return iter(self.directives)


def parse_script(text: str) -> TransformScript:
    """Parse the one-directive-per-line script format with line/column
    diagnostics.  Blank lines and # comments are skipped."""
    directives = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()

        def col_of(tok):
            return raw.index(tok) + 1

        def want_handle(tok):
            if not tok.startswith("%") or len(tok) < 2:
                raise ScriptError("expected a %%handle, got %r" % tok,
                                  ln, col_of(tok))
            return tok[1:]

        head = tokens[0]
        if head == "tile":
            if len(tokens) != 4:
                raise ScriptError("tile needs: tile %op axis=<a> size=<n>", ln, 1)
            op = want_handle(tokens[1])
            axis = _kv(tokens[2], "axis", ln, col_of(tokens[2]))
            size_text = _kv(tokens[3], "size", ln, col_of(tokens[3]))
            try:
                size = int(size_text)
            except ValueError:
                raise ScriptError("size must be an integer, got %r" % size_text,
                                  ln, col_of(tokens[3]))
            directives.append(Tile(op, axis, size, ln))
        elif head == "fuse":
            if len(tokens) != 3:
                raise ScriptError("fuse needs: fuse %loopA %loopB", ln, 1)
            directives.append(Fuse(want_handle(tokens[1]),
                                   want_handle(tokens[2]), ln))
        elif head == "plan-inplace":
            if len(tokens) != 1:
                raise ScriptError("plan-inplace takes no arguments", ln,
                                  col_of(tokens[1]))
            directives.append(PlanInPlace(ln))
        elif head == "vectorize":
            if len(tokens) != 3:
                raise ScriptError(
                    "vectorize needs: vectorize %loop width=<n> | scalable", ln, 1)
            loop = want_handle(tokens[1])
            if tokens[2] == "scalable":
                directives.append(Vectorize(loop, None, True, ln))
            else:
                width_text = _kv(tokens[2], "width", ln, col_of(tokens[2]))
                try:
                    width = int(width_text)
                except ValueError:
                    raise ScriptError("width must be an integer, got %r"
                                      % width_text, ln, col_of(tokens[2]))
                directives.append(Vectorize(loop, width, False, ln))
        else:
            raise ScriptError("unknown directive %r" % head, ln, 1)
    return TransformScript(directives)


def _kv(token, key, line, col):
    if "=" not in token:
        raise ScriptError("expected %s=<value>, got %r" % (key, token), line, col)
    k, v = token.split("=", 1)
    if k != key:
        raise ScriptError("expected %s=<value>, got %r" % (key, token), line, col)
    return v


# ---------------------------------------------------------------------------
# The scheduler

@dataclass
class ScheduledProgram:
    """Loop forest plus buffer plan: the result of apply_script."""

    program: StepProgram
    items: list
    plan: dict
    extra_buffers: list
    loop_meta: dict          # loop name -> TileLoop (live ones)
    implicit_plan: bool

    def buffer_count(self):
        return len(set(self.plan.values()))


class _Handles:
    def __init__(self, op_ids):
        self.kind = {}
        self.alive = {}
        self.consumed_by = {}
        for oid in op_ids:
            self.kind[oid] = "op"
            self.alive[oid] = True

    def resolve(self, name, want_kind, directive_idx):
        if name not in self.kind:
            raise ScriptError("unknown handle %%%s" % name)
        if not self.alive[name]:
            raise ScriptError(
                "dangling handle %%%s (consumed by directive %d)"
                % (name, self.consumed_by[name]))
        if self.kind[name] != want_kind:
            raise ScriptError("%%%s is a %s handle, expected a %s"
                              % (name, self.kind[name], want_kind))
        return name

    def consume(self, name, directive_idx):
        self.alive[name] = False
        self.consumed_by[name] = directive_idx

    def create(self, name, kind):
        self.kind[name] = kind
        self.alive[name] = True


class Scheduler:
    """Applies directives one at a time; see apply_script."""

    def __init__(self, program: StepProgram):
        if verify_clean(program):
            raise ValidationError("cannot schedule a program that fails verify()")
        self.program = program
        self.items = [OpBody(op.id) for op in program.ops]
        self.handles = _Handles([op.id for op in program.ops])
        self.handle_target = {op.id: op.id for op in program.ops}
        self.loops = {}
        self.loop_counter = 0
        self.op_generation = {}
        self.plan = None
        self.extra = []
        self.any_vectorized = False
        self.directive_idx = -1

    # -- helpers

    def _new_loop_name(self):
        name = "loop%d" % self.loop_counter
        self.loop_counter += 1
        return name

    def _find(self, pred, items=None, parent=None):
        items = self.items if items is None else items
        for idx, item in enumerate(items):
            if pred(item):
                return item, items, idx, parent
            if isinstance(item, TileLoop):
                found = self._find(pred, item.body, item)
                if found:
                    return found
        return None

    def _op(self, op_id):
        return self.program.op(op_id)

    # -- directives

    def tile(self, op_handle, axis_name, size):
        if size < 1:
            raise ScriptError("tile size must be >= 1, got %d" % size)
        name = self.handles.resolve(op_handle, "op", self.directive_idx)
        op_id = self.handle_target[name]
        op = self._op(op_id)
        if isinstance(op, BoundaryOp) and op.face is None:
            raise ScriptError("cannot tile the empty placeholder op %%%s" % op_id)
        ndim = len(op.domain)
        if axis_name in AXIS_NAMES:
            axis = AXIS_NAMES[axis_name]
        else:
            try:
                axis = int(axis_name)
            except ValueError:
                raise ScriptError("axis must be i, j, k or 0..2, got %r" % axis_name)
        if not (0 <= axis < ndim):
            raise ScriptError("axis %s out of range for %dD op %%%s"
                              % (axis_name, ndim, op_id))

        found = self._find(lambda it: isinstance(it, OpBody) and it.op_id == op_id)
        body, container, idx, parent = found
        seen = parent
        while seen is not None:
            if seen.vector is not None:
                raise ScriptError("cannot tile inside vectorized loop %%%s"
                                  % seen.name)
            if seen.axis == axis:
                raise ScriptError("axis %s of %%%s is already tiled (loop %%%s)"
                                  % (axis_name, op_id, seen.name))
            seen = self._parent_of(seen)

        if isinstance(op, CurlStepOp):
            lo = op.origin[axis]
            hi = lo + op.domain[axis]
        else:
            lo, hi = 0, op.domain[axis]
        loop = TileLoop(self._new_loop_name(), axis, size,
                        tile_partition(lo, hi, size), [body])
        container[idx] = loop
        self.loops[loop.name] = loop

        self.handles.consume(name, self.directive_idx)
        gen = self.op_generation.get(op_id, 0) + 1
        self.op_generation[op_id] = gen
        new_op_handle = "%s.%d" % (op_id, gen)
        self.handles.create(new_op_handle, "op")
        self.handle_target[new_op_handle] = op_id
        self.handles.create(loop.name, "loop")
        return new_op_handle, loop.name

    def _parent_of(self, node):
        found = self._find(lambda it: it is node)
        return found[3] if found else None

    def fuse(self, a_handle, b_handle):
        a_name = self.handles.resolve(a_handle, "loop", self.directive_idx)
        b_name = self.handles.resolve(b_handle, "loop", self.directive_idx)
        if a_name == b_name:
            raise ScriptError("cannot fuse %%%s with itself" % a_name)
        pos = {}
        for want in (a_name, b_name):
            for idx, item in enumerate(self.items):
                if isinstance(item, TileLoop) and item.name == want:
                    pos[want] = idx
                    break
            else:
                raise ScriptError("only top-level loops can be fused; %%%s is "
                                  "nested" % want)
        a, b = self.loops[a_name], self.loops[b_name]
        if a.vector is not None or b.vector is not None:
            raise ScriptError("loops must be fused before vectorization")
        if a.axis != b.axis or a.tiles != b.tiles:
            raise ScriptError(
                "structure mismatch: %%%s iterates axis %d tiles %s but %%%s "
                "iterates axis %d tiles %s"
                % (a_name, a.axis, _fmt_tiles(a.tiles),
                   b_name, b.axis, _fmt_tiles(b.tiles)))

        first, second = (a, b) if pos[a_name] < pos[b_name] else (b, a)
        ops_first = [self._op(i) for i in subtree_op_ids(first)]
        ops_second = [self._op(i) for i in subtree_op_ids(second)]
        for oa in ops_first:
            for ob in ops_second:
                why = ops_conflict(oa, ob, self.program)
                if why:
                    raise ScriptError("not independent: %%%s and %%%s conflict "
                                      "(%s)" % (oa.id, ob.id, why))

        lo_idx = min(pos[a_name], pos[b_name])
        hi_idx = max(pos[a_name], pos[b_name])
        between = self.items[lo_idx + 1:hi_idx]
        for item in between:
            for mid_id in subtree_op_ids(item):
                mid = self._op(mid_id)
                for oa in ops_first:
                    why = ops_conflict(oa, mid, self.program)
                    if why:
                        raise ScriptError(
                            "cannot move %%%s past %%%s: %s"
                            % (first.name, mid_id, why))

        fused = TileLoop(self._new_loop_name(), a.axis, a.size, a.tiles,
                         first.body + second.body)
        self.items[hi_idx] = fused
        del self.items[lo_idx]
        self.handles.consume(a_name, self.directive_idx)
        self.handles.consume(b_name, self.directive_idx)
        del self.loops[a_name]
        del self.loops[b_name]
        self.loops[fused.name] = fused
        self.handles.create(fused.name, "loop")
        return fused.name

    def run_plan_inplace(self, implicit=False):
        if self.any_vectorized:
            raise ScriptError("plan-inplace must come before any vectorize")
        if self.plan is not None:
            raise ScriptError("plan-inplace may appear at most once")
        self.plan, self.extra = plan_inplace(self.program)
        self.implicit_plan = implicit

    def vectorize(self, loop_handle, width=None, scalable=False):
        name = self.handles.resolve(loop_handle, "loop", self.directive_idx)
        loop = self.loops[name]
        if self.plan is None:
            # Bufferization precedes vectorization; scripts that skip it get
            # the implicit whole-program plan here.
            self.run_plan_inplace(implicit=True)
        if loop.vector is not None:
            raise ScriptError("loop %%%s is already vectorized" % name)
        ops = [self._op(i) for i in subtree_op_ids(loop)]
        for op in ops:
            if loop.axis != len(op.domain) - 1:
                raise ScriptError(
                    "vectorize needs the innermost (k) axis loop; %%%s "
                    "iterates axis %d of %%%s" % (name, loop.axis, op.id))
        for child in loop.body:
            if not isinstance(child, OpBody):
                raise ScriptError(
                    "vectorize needs the innermost loop; %%%s contains a "
                    "nested tile loop" % name)
        if scalable:
            loop.vector = "scalable"
        else:
            if width is None or width < 1 or (width & (width - 1)) != 0:
                raise ScriptError("vector width must be a power of two >= 1, "
                                  "got %r" % (width,))
            loop.vector = width
        self.any_vectorized = True
        return name

    def finish(self):
        if self.plan is None:
            self.run_plan_inplace(implicit=True)
        return ScheduledProgram(self.program, self.items, self.plan,
                                self.extra, dict(self.loops),
                                getattr(self, "implicit_plan", False))


def _fmt_tiles(tiles):
    if len(tiles) > 4:
        return "[%s..%s, %d tiles]" % (tiles[0], tiles[-1], len(tiles))
    return str(list(tiles))


def verify_clean(program):
    from .ir import verify
    return verify(program)


def apply_script(program: StepProgram, script, target=None) -> ScheduledProgram:
    """Apply a TransformScript (or script text) in order.

    The first failing directive aborts with a ScriptError naming the
    directive index (and source line when the script came from text).
    `scalable` vector widths stay symbolic here; execution resolves them
    from the target at run start.
    """
    if isinstance(script, str):
        script = parse_script(script)
    sched = Scheduler(program)
    for idx, d in enumerate(script):
        sched.directive_idx = idx
        try:
            if isinstance(d, Tile):
                sched.tile(d.op, d.axis, d.size)
            elif isinstance(d, Fuse):
                sched.fuse(d.a, d.b)
            elif isinstance(d, PlanInPlace):
                sched.run_plan_inplace()
            elif isinstance(d, Vectorize):
                sched.vectorize(d.loop, d.width, d.scalable)
            else:
                raise ScriptError("unknown directive %r" % (d,))
        except ScriptError as e:
            if e.line is None and getattr(d, "line", 0):
                raise ScriptError(str(e), getattr(d, "line")) from None
            raise ScriptError("directive %d: %s" % (idx, e)) from None
    return sched.finish()


# ---------------------------------------------------------------------------
# Preset pipelines

PIPELINES = ("none", "tile", "tile+fuse", "tile+vec", "tile+vec+fuse")

_CURL_ORDER = ("curl_hx", "curl_hy", "curl_hz", "curl_ex", "curl_ey", "curl_ez")


def preset_script(pipeline: str, tile_size: int, width=None) -> str:
    """Script text for the named pipeline.

    The fusable groups are the sibling pairs with matching tile structure:
    {curl_hx, curl_hy} and {curl_ex, curl_ey}.  curl_hz and curl_ez iterate
    one extra k index (their arrays are node-centered along k), so their tile
    partitions never match the others and they stay solo: fusing them would
    drop or duplicate boundary iterations.
    """
    if pipeline not in PIPELINES:
        raise ValidationError("unknown pipeline %r (expected one of %s)"
                              % (pipeline, ", ".join(PIPELINES)))
    if pipeline == "none":
        return ""
    width = width or tile_size
    lines = ["tile %%%s axis=k size=%d" % (op, tile_size) for op in _CURL_ORDER]
    fused = "fuse" in pipeline
    if fused:
        lines.append("fuse %loop0 %loop1")   # -> %loop6
        lines.append("fuse %loop3 %loop4")   # -> %loop7
    if "vec" in pipeline:
        lines.append("plan-inplace")
        if fused:
            targets = ("loop6", "loop7", "loop2", "loop5")
        else:
            targets = tuple("loop%d" % i for i in range(6))
        lines.extend("vectorize %%%s width=%d" % (t, width) for t in targets)
    return "\n".join(lines) + "\n"
