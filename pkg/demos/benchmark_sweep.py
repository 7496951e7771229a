"""Small benchmark matrix with CSV output and a speedup table.

Times the step loop for two grid sizes and the transform presets, prints
the table of ratios against the untransformed kernel, and leaves the raw
records in benchmark_records.csv for the baseline package's plot script.
"""

import sys

from fdtdkit import BenchConfig, run_benchmark, speedup_table
from fdtdkit.bench import check_ordering, write_csv

CSV = "benchmark_records.csv"


def main():
    config = BenchConfig(sizes=(32, 64), steps=60, repeats=3, warmup=20,
                         precisions=("f32",),
                         pipelines=("none", "tile", "tile+vec",
                                    "tile+vec+fuse"))
    records = run_benchmark(
        config, progress=lambda msg: print("  timing " + msg,
                                           file=sys.stderr))
    for warning in check_ordering(records):
        print("warning: " + warning, file=sys.stderr)

    print("%6s %5s %15s %12s %9s" % ("size", "prec", "pipeline", "ms/step",
                                     "speedup"))
    for row in speedup_table(records):
        print("%6d %5s %15s %12.3f %8.2fx"
              % (row["size"], row["precision"], row["pipeline"],
                 1000.0 * row["mean_s"] / config.steps, row["speedup"]))

    with open(CSV, "w", newline="") as f:
        write_csv(records, f)
    print("\nraw records: %s" % CSV)
    print("combine with numpy baseline rows via:")
    print("  fdtd-baseline run --n 64 --steps 60 --csv numpy_records.csv")
    print("  fdtd-baseline plot-speedups --csv numpy_records.csv %s" % CSV)


if __name__ == "__main__":
    main()
