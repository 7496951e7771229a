"""End-to-end CLI tests through real subprocesses.

Every test drives `python -m fdtdkit ...` the way a user would, so argument
parsing, exit codes, stream separation, and cross-process determinism are
all exercised for real.
"""

import json
import os
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "fdtdkit"]


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    env["FDTD_TARGET"] = "avx2"          # host-independent schedules
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CMD + list(args), capture_output=True,
                          text=True, env=env)


RUN_ARGS = ("run", "--n", "8", "--unit", "--init", "random", "--seed", "5",
            "--steps", "10")


# -------------------------------------------------------------------- run

def test_run_reports_stats_json():
    r = run_cli(*RUN_ARGS)
    assert r.returncode == 0, r.stderr
    payload = json.loads(r.stdout)
    assert payload["steps"] == 10
    assert payload["wall_s"] > 0 and payload["cells_per_s"] > 0
    assert payload["energy"] > 0


def test_run_requires_grid_size():
    r = run_cli("run", "--steps", "1")
    assert r.returncode == 1
    assert "grid size missing" in r.stderr
    assert r.stdout == ""


def test_run_rejects_unknown_precision():
    r = run_cli(*RUN_ARGS, "--precision", "f16")
    assert r.returncode == 1
    assert "invalid choice" in r.stderr


def test_run_rejects_pipeline_and_script_together(tmp_path):
    script = tmp_path / "s.txt"
    script.write_text("plan-inplace\n")
    r = run_cli(*RUN_ARGS, "--pipeline", "tile", "--script", str(script))
    assert r.returncode == 1
    assert "not allowed with" in r.stderr


def test_run_rejects_overlong_dt():
    r = run_cli("run", "--n", "8", "--unit", "--dt", "1.0", "--steps", "1")
    assert r.returncode == 1
    assert "exceeds the stability limit" in r.stderr


def test_run_unstable_dt_exits_two():
    r = run_cli("run", "--n", "8", "--unit", "--dt", "0.5",
                "--allow-unstable", "--init", "random", "--seed", "3",
                "--steps", "1000")
    assert r.returncode == 2
    assert "instability detected at step" in r.stderr
    assert r.stdout == ""


def test_run_accepts_script_file(tmp_path):
    script = tmp_path / "s.txt"
    script.write_text("tile %curl_hx axis=k size=4\n"
                      "plan-inplace\n"
                      "vectorize %loop0 width=4\n")
    r = run_cli(*RUN_ARGS, "--script", str(script))
    assert r.returncode == 0, r.stderr


def test_run_script_diagnostics_carry_line_numbers(tmp_path):
    script = tmp_path / "s.txt"
    script.write_text("tile %curl_hx axis=k size=4\n"
                      "tile %curl_hx axis=j size=4\n")
    r = run_cli(*RUN_ARGS, "--script", str(script))
    assert r.returncode == 1
    assert "line 2:" in r.stderr and "dangling handle" in r.stderr


def test_run_dump_to_bad_path_exits_two(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    r = run_cli(*RUN_ARGS, "--dump-out", str(blocker / "sub"))
    assert r.returncode == 2
    assert "error:" in r.stderr


# ---------------------------------------------------------- determinism

def test_run_dumps_identical_across_processes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        r = run_cli(*RUN_ARGS, "--pipeline", "tile+vec+fuse",
                    "--dump-out", str(out))
        assert r.returncode == 0, r.stderr
    for comp in ("ex", "ey", "ez", "hx", "hy", "hz"):
        raw_a = (a / (comp + ".raw")).read_bytes()
        raw_b = (b / (comp + ".raw")).read_bytes()
        assert raw_a == raw_b, comp
        assert (a / (comp + ".json")).read_text() == \
               (b / (comp + ".json")).read_text()


def test_pipelines_agree_end_to_end(tmp_path):
    a, b = tmp_path / "plain", tmp_path / "sched"
    assert run_cli(*RUN_ARGS, "--dump-out", str(a)).returncode == 0
    assert run_cli(*RUN_ARGS, "--pipeline", "tile+vec+fuse",
                   "--dump-out", str(b)).returncode == 0
    r = run_cli("compare-dumps", str(a), str(b))
    assert r.returncode == 0, r.stdout + r.stderr
    lines = r.stdout.splitlines()
    assert len(lines) == 6
    assert all(line.endswith("ok max_ulp=0") for line in lines)


# --------------------------------------------------------- compare-dumps

def test_compare_dumps_mismatch_exits_two(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(*RUN_ARGS, "--dump-out", str(a)).returncode == 0
    assert run_cli("run", "--n", "8", "--unit", "--init", "random",
                   "--seed", "6", "--steps", "10",
                   "--dump-out", str(b)).returncode == 0
    r = run_cli("compare-dumps", str(a), str(b))
    assert r.returncode == 2
    assert "MISMATCH" in r.stdout
    assert "dumps differ beyond 0 ulps" in r.stderr


def test_compare_dumps_missing_dir_exits_two(tmp_path):
    a = tmp_path / "a"
    assert run_cli(*RUN_ARGS, "--dump-out", str(a)).returncode == 0
    r = run_cli("compare-dumps", str(a), str(tmp_path / "nope"))
    assert r.returncode == 2
    assert "ERROR" in r.stdout


# -------------------------------------------------------------- dump-ir

def test_dump_ir_plain_program():
    r = run_cli("dump-ir", "--n", "4", "--unit")
    assert r.returncode == 0
    assert r.stdout.startswith("program nx=4 ny=4 nz=4 precision=f64")
    assert "curl_hx" in r.stdout and "bnd_zhi_ey" in r.stdout
    assert "lowered" not in r.stdout


def test_dump_ir_with_pipeline_appends_descriptor():
    r = run_cli("dump-ir", "--n", "4", "--unit",
                "--pipeline", "tile+vec+fuse")
    assert r.returncode == 0
    assert "program nx=4" in r.stdout
    assert "lowered nx=4 ny=4 nz=4 precision=f64 target=avx2" in r.stdout
    assert "loop %loop6" in r.stdout


def test_dump_ir_deterministic_across_processes(tmp_path):
    outs = []
    for name in ("x.txt", "y.txt"):
        path = tmp_path / name
        r = run_cli("dump-ir", "--n", "16", "--unit", "--precision", "f32",
                    "--pipeline", "tile+vec+fuse", "--out", str(path))
        assert r.returncode == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


# ----------------------------------------------------------- export-vtk

def test_export_vtk_single_component(tmp_path):
    out = tmp_path / "ez.vtk"
    r = run_cli("export-vtk", "--n", "4", "--unit", "--init", "mode:1,1,0",
                "--out", str(out))
    assert r.returncode == 0
    text = out.read_text()
    assert text.startswith("# vtk DataFile Version 3.0\nez field, step 0\n")
    assert "DIMENSIONS 5 5 4" in text


def test_export_vtk_all_components(tmp_path):
    out = tmp_path / "frames"
    r = run_cli("export-vtk", "--n", "4", "--unit", "--steps", "3",
                "--component", "all", "--out", str(out))
    assert r.returncode == 0
    names = sorted(os.listdir(out))
    assert names == ["ex.vtk", "ey.vtk", "ez.vtk",
                     "hx.vtk", "hy.vtk", "hz.vtk"]
    assert "step 3" in (out / "hx.vtk").read_text().splitlines()[1]


def test_export_vtk_rejects_unknown_component(tmp_path):
    r = run_cli("export-vtk", "--n", "4", "--unit", "--component", "bz",
                "--out", str(tmp_path / "x.vtk"))
    assert r.returncode == 1
    assert "invalid choice" in r.stderr


# ---------------------------------------------------------------- bench

def test_bench_csv_to_stdout():
    r = run_cli("bench", "--sizes", "4", "--steps", "2", "--repeats", "1",
                "--warmup", "0", "--precisions", "f64",
                "--pipelines", "none,tile")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0].startswith("size,precision,pipeline,steps,repeats,")
    assert len(lines) == 3
    assert lines[1].startswith("4,f64,none,2,1,")
    assert lines[2].startswith("4,f64,tile,2,1,")
    assert "bench: size=4 precision=f64 pipeline=none" in r.stderr


def test_bench_csv_to_file(tmp_path):
    path = tmp_path / "out.csv"
    r = run_cli("bench", "--sizes", "4", "--steps", "2", "--repeats", "1",
                "--warmup", "0", "--precisions", "f32",
                "--pipelines", "none", "--csv", str(path))
    assert r.returncode == 0, r.stderr
    assert "wrote 1 records to" in r.stderr
    assert path.read_text().splitlines()[1].startswith("4,f32,none,")


def test_bench_rejects_unknown_pipeline():
    r = run_cli("bench", "--sizes", "4", "--pipelines", "warp")
    assert r.returncode == 1
    assert "unknown pipeline" in r.stderr


# -------------------------------------------------------------- general

def test_no_subcommand_exits_one():
    r = run_cli()
    assert r.returncode == 1
    assert "error:" in r.stderr


def test_unknown_subcommand_exits_one():
    r = run_cli("explode")
    assert r.returncode == 1
    assert "invalid choice" in r.stderr
