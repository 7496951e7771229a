"""Run configuration, timing records, CSV schema, and dump side effects."""

import io
import json
import os

import numpy as np
import pytest

from fdtd_baseline import (BaselineConfig, COMPONENTS, CSV_COLUMNS, GridSpec,
                           RunRecord, ValidationError, append_csv,
                           baseline_run, host_tag, random_fields, read_csv,
                           read_dump, write_dump)


def test_config_needs_exactly_one_start_state(tmp_path):
    with pytest.raises(ValidationError, match="not both and not neither"):
        BaselineConfig(steps=1)
    with pytest.raises(ValidationError, match="not both and not neither"):
        BaselineConfig(n=8, load_dump=str(tmp_path), steps=1)
    with pytest.raises(ValidationError, match="n must be >= 2"):
        BaselineConfig(n=1, steps=1)
    with pytest.raises(ValidationError, match="steps must be >= 0"):
        BaselineConfig(n=8, steps=-1)
    with pytest.raises(ValidationError, match="repeats must be >= 1"):
        BaselineConfig(n=8, steps=1, repeats=0)
    with pytest.raises(ValidationError, match="stepper must be one of"):
        BaselineConfig(n=8, steps=1, stepper="jit")
    with pytest.raises(ValidationError, match="precision must be"):
        BaselineConfig(n=8, steps=1, precision="f16")


def test_zero_init_run_writes_all_zero_dumps(tmp_path):
    out = str(tmp_path / "d")
    config = BaselineConfig(n=4, steps=3, dump_out=out)
    record, final, grid = baseline_run(config)
    assert record.pipeline == "numpy-slice"
    assert record.size == 4 and record.steps == 3
    fields, g2, meta = read_dump(out)
    assert meta["step"] == 3
    for comp in COMPONENTS:
        assert not fields[comp].any()


def test_naive_stepper_matches_slice_through_the_runner():
    a, _, _ = baseline_run(BaselineConfig(n=4, steps=2, seed=8,
                                          stepper="slice"))
    rec, fields_naive, _ = baseline_run(BaselineConfig(n=4, steps=2, seed=8,
                                                       stepper="naive"))
    assert rec.pipeline == "numpy-naive"
    _, fields_slice, _ = baseline_run(BaselineConfig(n=4, steps=2, seed=8))
    for comp in COMPONENTS:
        assert fields_naive[comp].tobytes() == fields_slice[comp].tobytes()


def test_load_and_zero_steps_round_trips_the_dump(tmp_path):
    g = GridSpec(nx=4, ny=4, nz=4, precision="f32")
    src = str(tmp_path / "src")
    write_dump(random_fields(g, seed=2), g, src, step=5, seed=2)
    out = str(tmp_path / "out")
    record, _, grid = baseline_run(BaselineConfig(
        load_dump=src, steps=0, dump_out=out))
    assert grid == g and record.precision == "f32"
    for comp in COMPONENTS:
        a = open(os.path.join(src, comp + ".raw"), "rb").read()
        b = open(os.path.join(out, comp + ".raw"), "rb").read()
        assert a == b
    # step numbering continues from the loaded sidecar
    _, _, meta = read_dump(out)
    assert meta["step"] == 5


def test_load_rejects_tampered_grid(tmp_path):
    g = GridSpec(nx=4, ny=4, nz=4)
    src = str(tmp_path / "src")
    write_dump(random_fields(g, seed=2), g, src)
    for comp in COMPONENTS:
        path = os.path.join(src, comp + ".json")
        meta = json.load(open(path))
        meta["params"]["nx"] = 5
        json.dump(meta, open(path, "w"))
    with pytest.raises(ValidationError, match="sidecar grid implies"):
        baseline_run(BaselineConfig(load_dump=src, steps=1))


def test_csv_schema_and_round_trip(tmp_path):
    path = str(tmp_path / "runs.csv")
    r1, _, _ = baseline_run(BaselineConfig(n=4, steps=2, csv_out=path,
                                           notes="a"))
    r2, _, _ = baseline_run(BaselineConfig(n=4, steps=2, stepper="naive",
                                           csv_out=path))
    lines = open(path).read().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3  # one header even though two runs appended
    assert lines[1].startswith("4,f64,numpy-slice,2,1,")
    assert lines[2].startswith("4,f64,numpy-naive,2,1,")
    back = read_csv(open(path))
    assert back[0].mean_s == r1.mean_s  # repr round-trip is exact
    assert back[0].notes == "a" and back[0].speedup is None
    assert back[1].cells_per_s == r2.cells_per_s
    assert "/numpy" in back[0].host and back[0].host == host_tag()


def test_read_csv_rejects_foreign_header():
    buf = io.StringIO("a,b,c\n1,2,3\n")
    with pytest.raises(ValidationError, match="unexpected CSV header"):
        read_csv(buf)


def test_append_csv_writes_header_once():
    buf = io.StringIO()
    rec = RunRecord(size=4, precision="f64", pipeline="numpy-slice",
                    steps=1, repeats=1, mean_s=0.5, std_s=0.0,
                    cells_per_s=128.0, speedup=None, baseline="",
                    host="x/numpy")
    append_csv([rec], buf)
    append_csv([rec], buf)
    # csv writes RFC-4180 CRLF endings; StringIO keeps them verbatim
    lines = buf.getvalue().strip().split("\r\n")
    assert len(lines) == 3 and lines[0] == ",".join(CSV_COLUMNS)


def test_timing_covers_repeats_from_identical_state():
    record, final, grid = baseline_run(BaselineConfig(
        n=6, steps=4, seed=1, repeats=3, warmup=1))
    assert record.repeats == 3 and record.mean_s > 0
    assert record.cells_per_s > 0
    # final state equals a single fresh run: repeats never accumulate
    _, once, _ = baseline_run(BaselineConfig(n=6, steps=4, seed=1))
    for comp in COMPONENTS:
        assert final[comp].tobytes() == once[comp].tobytes()
