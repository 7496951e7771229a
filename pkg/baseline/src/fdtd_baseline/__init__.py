"""NumPy slice and naive-loop FDTD baselines with shared dump interchange."""

from .grids import (COMPONENTS, EPS0, MU0, GridSpec, ValidationError,
                    alloc_fields, component_shape, random_fields, read_dump,
                    write_dump)
from .plotting import load_records, plot_speedups, render_table, speedup_rows
from .runner import (BASELINE_PIPELINE, CSV_COLUMNS, BaselineConfig,
                     RunRecord, append_csv, baseline_run, host_tag, read_csv)
from .steppers import (STEPPERS, check_fields, coefficients, get_stepper,
                       loop_step, slice_step)

__all__ = [
    "COMPONENTS", "EPS0", "MU0", "GridSpec", "ValidationError",
    "alloc_fields", "component_shape", "random_fields", "read_dump",
    "write_dump", "load_records", "plot_speedups", "render_table",
    "speedup_rows", "BASELINE_PIPELINE", "CSV_COLUMNS", "BaselineConfig",
    "RunRecord", "append_csv", "baseline_run", "host_tag", "read_csv",
    "STEPPERS", "check_fields", "coefficients", "get_stepper", "loop_step",
    "slice_step",
]
