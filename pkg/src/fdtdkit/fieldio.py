"""Field dumps and dump comparison.

Dump format (shared with the companion baseline package): one file per
component holding raw little-endian scalars in row-major order (i slowest,
k fastest), plus a JSON sidecar carrying component, shape, dtype, step,
params, and seed.  Round-trips are bit-exact.

Comparison is ULP-aware: floats map onto an order-preserving integer key so
the distance between two values counts representable numbers between them.
+0 and -0 compare equal; differing NaN bits never match.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import ValidationError
from .fields import FieldSet
from .params import COMPONENTS, SimParams

_WIRE = {"f32": "<f4", "f64": "<f8"}


def dump_fields(fields: FieldSet, outdir: str, step: int = 0,
                seed: int | None = None):
    """Write all six components (raw + sidecar) into outdir."""
    os.makedirs(outdir, exist_ok=True)
    p = fields.params
    for comp in COMPONENTS:
        arr = fields.component(comp)
        raw = arr.astype(_WIRE[p.precision], copy=False).tobytes()
        with open(os.path.join(outdir, comp + ".raw"), "wb") as f:
            f.write(raw)
        sidecar = {
            "component": comp,
            "shape": list(arr.shape),
            "dtype": p.precision,
            "step": step,
            "params": p.to_dict(),
            "seed": seed,
        }
        with open(os.path.join(outdir, comp + ".json"), "w") as f:
            json.dump(sidecar, f, indent=1, sort_keys=True)
            f.write("\n")


def load_component(dumpdir: str, comp: str):
    """One component back as (native-order array, sidecar dict)."""
    with open(os.path.join(dumpdir, comp + ".json")) as f:
        meta = json.load(f)
    if meta.get("dtype") not in _WIRE:
        raise ValidationError("sidecar for %s has unknown dtype %r"
                              % (comp, meta.get("dtype")))
    wire = np.fromfile(os.path.join(dumpdir, comp + ".raw"),
                       dtype=_WIRE[meta["dtype"]])
    shape = tuple(meta["shape"])
    if wire.size != int(np.prod(shape)):
        raise ValidationError(
            "raw size %d of %s does not match sidecar shape %s"
            % (wire.size, comp, shape))
    native = np.float32 if meta["dtype"] == "f32" else np.float64
    return np.ascontiguousarray(wire.reshape(shape).astype(native)), meta


def load_fields(dumpdir: str) -> FieldSet:
    """Rebuild a FieldSet (params included) from a dump directory."""
    arrays = {}
    meta = None
    for comp in COMPONENTS:
        arrays[comp], meta = load_component(dumpdir, comp)
    params = SimParams.from_dict(meta["params"])
    fs = FieldSet(params, *(arrays[c] for c in COMPONENTS))
    if not fs.allclose_shapes():
        raise ValidationError("dumped shapes do not match the sidecar params")
    return fs


def ulp_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-element count of representable values between a and b (uint64).

    Equal bit patterns (and +0 vs -0) give 0.  Any NaN against a different
    bit pattern gives the maximum distance.
    """
    if a.shape != b.shape or a.dtype != b.dtype:
        raise ValidationError("ulp_distance needs matching shapes and dtypes")
    if a.dtype == np.float32:
        bits_a = a.view(np.uint32).astype(np.uint64)
        bits_b = b.view(np.uint32).astype(np.uint64)
        sign = np.uint64(1) << np.uint64(31)
        mask = sign - np.uint64(1)
    elif a.dtype == np.float64:
        bits_a = a.view(np.uint64).copy()
        bits_b = b.view(np.uint64).copy()
        sign = np.uint64(1) << np.uint64(63)
        mask = sign - np.uint64(1)
    else:
        raise ValidationError("ulp_distance supports f32/f64 arrays only")

    def key(bits):
        mag = bits & mask
        return np.where(bits & sign, sign - mag, sign + mag)

    ka, kb = key(bits_a), key(bits_b)
    dist = np.maximum(ka, kb) - np.minimum(ka, kb)
    dist = np.where(bits_a == bits_b, np.uint64(0), dist)
    bad = np.isnan(a) | np.isnan(b)
    if bad.any():
        top = np.iinfo(np.uint64).max
        dist = np.where(bad & (bits_a != bits_b), np.uint64(top), dist)
    return dist


def compare_dumps(dir_a: str, dir_b: str, max_ulps: int = 0):
    """Compare two dump directories component by component.

    Returns (ok, report): report is one dict per component with the max ULP
    distance, the count of elements beyond max_ulps, and the first offending
    flat index.  Structural problems (missing files, shape or dtype
    disagreements) appear as an "error" entry and force ok=False.
    """
    ok = True
    report = []
    for comp in COMPONENTS:
        entry = {"component": comp}
        try:
            a, meta_a = load_component(dir_a, comp)
            b, meta_b = load_component(dir_b, comp)
        except (OSError, ValidationError) as e:
            entry["error"] = str(e)
            report.append(entry)
            ok = False
            continue
        if a.shape != b.shape or meta_a["dtype"] != meta_b["dtype"]:
            entry["error"] = ("shape/dtype mismatch: %s %s vs %s %s"
                              % (a.shape, meta_a["dtype"], b.shape, meta_b["dtype"]))
            report.append(entry)
            ok = False
            continue
        dist = ulp_distance(a, b)
        over = dist > np.uint64(max_ulps)
        entry["max_ulp"] = int(dist.max()) if dist.size else 0
        entry["over"] = int(np.count_nonzero(over))
        if entry["over"]:
            entry["first_index"] = int(np.argmax(over))
            ok = False
        report.append(entry)
    return ok, report
