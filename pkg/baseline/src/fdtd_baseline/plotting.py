"""Speedup reporting from benchmark-schema CSV files.

Every record is expressed as a ratio against the double-precision NumPy
slice row of the same host machine and grid size, one chart per machine.
The --print-table path emits the same ratios as text with full float
precision (repr), so results can be checked exactly without rendering
pixels.
"""

from __future__ import annotations

import os

from .grids import ValidationError
from .runner import BASELINE_PIPELINE, read_csv


def load_records(csv_paths):
    records = []
    for path in csv_paths:
        with open(path, newline="") as f:
            records.extend(read_csv(f))
    return records


def _machine(record) -> str:
    # host is "<machine>/<target>"; charts and ratios group by machine so
    # engine rows and numpy rows from the same box land together.
    return record.host.split("/", 1)[0]


def speedup_rows(records):
    """One dict per record with its ratio vs the f64 slice baseline.

    Raises when any (machine, size) group lacks a baseline row.
    """
    base = {}
    for r in records:
        if r.pipeline == BASELINE_PIPELINE and r.precision == "f64":
            base[(_machine(r), r.size)] = r.mean_s
    rows = []
    for r in records:
        key = (_machine(r), r.size)
        if key not in base:
            raise ValidationError(
                "no f64 %s baseline for host %s size %d"
                % (BASELINE_PIPELINE, key[0], key[1]))
        rows.append({
            "machine": key[0], "size": r.size, "pipeline": r.pipeline,
            "precision": r.precision, "mean_s": r.mean_s,
            "speedup": base[key] / r.mean_s,
        })
    rows.sort(key=lambda d: (d["machine"], d["size"], d["pipeline"],
                             d["precision"]))
    return rows


def render_table(rows) -> str:
    """Deterministic text table, one host block per machine.

    mean_s and speedup are printed with repr so they parse back to the
    exact floats; recomputing baseline_mean / mean reproduces each cell.
    """
    lines = []
    current = None
    for row in rows:
        if row["machine"] != current:
            if current is not None:
                lines.append("")
            current = row["machine"]
            lines.append("host %s" % current)
            lines.append("size pipeline precision mean_s speedup")
        lines.append("%d %s %s %s %s" % (
            row["size"], row["pipeline"], row["precision"],
            repr(row["mean_s"]), repr(row["speedup"])))
    return "\n".join(lines) + "\n" if lines else ""


def plot_speedups(csv_paths, outdir: str = ".", fmt: str = "png"):
    """Write one speedup-vs-size chart per host machine; returns the paths.

    Lines are keyed by (pipeline, precision); with duplicate rows for the
    same size the last one wins.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = speedup_rows(load_records(csv_paths))
    machines = sorted({row["machine"] for row in rows})
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for machine in machines:
        series = {}
        for row in rows:
            if row["machine"] != machine:
                continue
            series.setdefault((row["pipeline"], row["precision"]),
                              {})[row["size"]] = row["speedup"]
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (pipeline, precision) in sorted(series):
            points = series[(pipeline, precision)]
            sizes = sorted(points)
            ax.plot(sizes, [points[s] for s in sizes], marker="o",
                    label="%s %s" % (pipeline, precision))
        ax.set_xscale("log", base=2)
        ax.set_xticks(sorted({row["size"] for row in rows
                              if row["machine"] == machine}))
        ax.get_xaxis().set_major_formatter(plt.ScalarFormatter())
        ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
        ax.set_xlabel("grid size N (N^3 cells)")
        ax.set_ylabel("speedup vs f64 numpy slice")
        ax.set_title("FDTD step speedup on %s" % machine)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(outdir, "speedup_%s.%s"
                            % (machine.replace("/", "_"), fmt))
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
