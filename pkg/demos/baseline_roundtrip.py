"""Engine and NumPy baseline advancing the same fields via shared dumps.

The two implementations never import each other; everything flows through
dump directories (raw + JSON sidecar) and benchmark CSV rows.  This script
dumps an initial state from the engine CLI, advances it 10 steps on both
sides, reports the worst per-element disagreement, then times both at 64^3
and prints the combined speedup table.
"""

import os
import subprocess
import sys
import tempfile

import numpy as np

ENGINE = (sys.executable, "-m", "fdtdkit")
BASELINE = (sys.executable, "-m", "fdtd_baseline")


def sh(*cmd):
    r = subprocess.run(cmd, capture_output=True, text=True)
    if r.returncode != 0:
        sys.exit("command failed: %s\n%s" % (" ".join(cmd), r.stderr))
    return r.stdout


def main():
    with tempfile.TemporaryDirectory() as tmp:
        init = os.path.join(tmp, "init")
        prim = os.path.join(tmp, "prim")
        base = os.path.join(tmp, "base")
        common = ("--n", "16", "--init", "random", "--seed", "42")

        print("engine dumps the start state and its own 10-step result...")
        sh(*ENGINE, "run", *common, "--steps", "0", "--dump-out", init)
        sh(*ENGINE, "run", *common, "--steps", "10", "--dump-out", prim)

        print("baseline loads the dump and advances the same 10 steps...")
        sh(*BASELINE, "run", "--load", init, "--steps", "10",
           "--dump-out", base)

        worst = 0.0
        for comp in ("ex", "ey", "ez", "hx", "hy", "hz"):
            a = np.fromfile(os.path.join(prim, comp + ".raw"), dtype="<f8")
            b = np.fromfile(os.path.join(base, comp + ".raw"), dtype="<f8")
            denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
            worst = max(worst, float((np.abs(a - b) / denom).max()))
        print("worst per-element relative difference: %.3e" % worst)

        print("\ntiming both at 64^3 f64 (10 steps x 3 repeats)...")
        base_csv = os.path.join(tmp, "base.csv")
        prim_csv = os.path.join(tmp, "prim.csv")
        sh(*BASELINE, "run", "--n", "64", "--steps", "10", "--repeats", "3",
           "--warmup", "2", "--csv", base_csv)
        sh(*ENGINE, "bench", "--sizes", "64", "--precisions", "f64",
           "--pipelines", "none,tile+vec+fuse", "--steps", "10",
           "--repeats", "3", "--warmup", "5", "--csv", prim_csv)
        print(sh(*BASELINE, "plot-speedups", "--csv", base_csv, prim_csv,
                 "--print-table"))
        out = sh(*BASELINE, "plot-speedups", "--csv", base_csv, prim_csv,
                 "--outdir", ".").strip()
        print("chart: %s" % out)


if __name__ == "__main__":
    main()
