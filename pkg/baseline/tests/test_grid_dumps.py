"""Grid geometry and the shared dump wire format."""

import json
import math
import os

import numpy as np
import pytest

from fdtd_baseline import (COMPONENTS, GridSpec, ValidationError,
                           alloc_fields, component_shape, random_fields,
                           read_dump, write_dump)


def test_component_shapes_are_staggered():
    nx, ny, nz = 4, 5, 6
    assert component_shape("ex", nx, ny, nz) == (4, 6, 7)
    assert component_shape("ey", nx, ny, nz) == (5, 5, 7)
    assert component_shape("ez", nx, ny, nz) == (5, 6, 6)
    assert component_shape("hx", nx, ny, nz) == (5, 5, 6)
    assert component_shape("hy", nx, ny, nz) == (4, 6, 6)
    assert component_shape("hz", nx, ny, nz) == (4, 5, 7)
    with pytest.raises(ValidationError, match="unknown field component"):
        component_shape("bx", nx, ny, nz)


def test_grid_validation():
    with pytest.raises(ValidationError, match="nx must be >= 2"):
        GridSpec(nx=1, ny=4, nz=4)
    with pytest.raises(ValidationError, match="precision"):
        GridSpec(nx=4, ny=4, nz=4, precision="f16")
    with pytest.raises(ValidationError, match="cfl_factor"):
        GridSpec(nx=4, ny=4, nz=4, cfl_factor=0.0)
    with pytest.raises(ValidationError, match="exceeds the stability limit"):
        GridSpec(nx=4, ny=4, nz=4, eps=1.0, mu=1.0, dt=10.0)
    with pytest.raises(ValidationError, match="dx must be > 0"):
        GridSpec(nx=4, ny=4, nz=4, dx=0.0)


def test_default_dt_comes_from_the_stability_limit():
    g = GridSpec(nx=4, ny=4, nz=4, dx=0.5, dy=1.0, dz=2.0, eps=1.0, mu=1.0,
                 cfl_factor=0.5)
    limit = 1.0 / math.sqrt(1 / 0.25 + 1.0 + 1 / 4.0)
    assert g.dt == pytest.approx(0.5 * limit, rel=1e-15)
    assert g.cells == 64
    assert g.dtype is np.float64


def test_grid_dict_round_trip_keeps_every_key():
    g = GridSpec(nx=3, ny=4, nz=5, dx=0.1, eps=2.0, mu=3.0,
                 precision="f32", cfl_factor=0.25)
    d = g.to_dict()
    assert sorted(d) == ["cfl_factor", "dt", "dx", "dy", "dz", "eps", "mu",
                         "nx", "ny", "nz", "precision"]
    assert GridSpec.from_dict(d) == g


@pytest.mark.parametrize("precision", ["f32", "f64"])
def test_dump_round_trip_is_bit_exact(tmp_path, precision):
    g = GridSpec(nx=3, ny=4, nz=5, precision=precision)
    fields = random_fields(g, seed=11)
    fields["ex"][0, 1, 1] = g.dtype(-0.0)  # signed zero must survive
    out = str(tmp_path / "dump")
    write_dump(fields, g, out, step=7, seed=11)
    loaded, g2, meta = read_dump(out)
    assert g2 == g
    assert meta["step"] == 7 and meta["seed"] == 11
    for comp in COMPONENTS:
        assert loaded[comp].tobytes() == fields[comp].tobytes()
        assert loaded[comp].dtype == g.dtype


def test_sidecar_contents(tmp_path):
    g = GridSpec(nx=2, ny=3, nz=4, precision="f64")
    out = str(tmp_path / "d")
    write_dump(alloc_fields(g), g, out, step=2, seed=None)
    with open(os.path.join(out, "hx")  + ".json") as f:
        meta = json.load(f)
    assert meta["component"] == "hx"
    assert meta["shape"] == [3, 3, 4]
    assert meta["dtype"] == "f64"
    assert meta["seed"] is None
    assert meta["params"]["nx"] == 2
    assert os.path.getsize(os.path.join(out, "hx.raw")) == 3 * 3 * 4 * 8


def test_read_rejects_unknown_dtype(tmp_path):
    g = GridSpec(nx=2, ny=2, nz=2)
    out = str(tmp_path / "d")
    write_dump(alloc_fields(g), g, out)
    path = os.path.join(out, "ex.json")
    meta = json.load(open(path))
    meta["dtype"] = "f16"
    json.dump(meta, open(path, "w"))
    with pytest.raises(ValidationError, match="unknown dtype"):
        read_dump(out)


def test_read_rejects_truncated_raw(tmp_path):
    g = GridSpec(nx=2, ny=2, nz=2)
    out = str(tmp_path / "d")
    write_dump(alloc_fields(g), g, out)
    raw = os.path.join(out, "ey.raw")
    data = open(raw, "rb").read()
    open(raw, "wb").write(data[:-8])
    with pytest.raises(ValidationError, match="does not match sidecar shape"):
        read_dump(out)


def test_read_rejects_shape_off_the_staggering(tmp_path):
    # sidecar internally consistent, but the shape does not belong to the
    # grid its params describe
    g = GridSpec(nx=2, ny=2, nz=2)
    out = str(tmp_path / "d")
    write_dump(alloc_fields(g), g, out)
    path = os.path.join(out, "ez.json")
    meta = json.load(open(path))
    meta["shape"] = [3, 3, 3]
    json.dump(meta, open(path, "w"))
    arr = np.zeros((3, 3, 3))
    arr.astype("<f8").tofile(os.path.join(out, "ez.raw"))
    with pytest.raises(ValidationError, match="sidecar grid implies"):
        read_dump(out)


def test_random_fields_seeded_and_wall_clean():
    g = GridSpec(nx=4, ny=4, nz=4, precision="f32")
    a = random_fields(g, seed=5)
    b = random_fields(g, seed=5)
    c = random_fields(g, seed=6)
    assert all(np.array_equal(a[k], b[k]) for k in COMPONENTS)
    assert not np.array_equal(a["ex"], c["ex"])
    assert np.abs(a["ex"][:, 1:-1, 1:-1]).min() > 0
    for arr, axis in ((a["ey"], 0), (a["ez"], 0), (a["ex"], 1),
                      (a["ez"], 1), (a["ex"], 2), (a["ey"], 2)):
        assert not arr.take(0, axis=axis).any()
        assert not arr.take(-1, axis=axis).any()
    for comp in ("hx", "hy", "hz"):
        assert not a[comp].any()
