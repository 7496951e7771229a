"""Schedulable 3D FDTD engine on a staggered grid.

The solver is expressed as a small structured-op program (six curl updates
plus boundary passes, all iterators parallel) that a transform pipeline can
tile, fuse, bufferize, and vectorize before execution.  A naive triple-loop
reference stepper provides the bit-exactness oracle.
"""

from .bench import BenchConfig, BenchRecord, run_benchmark, speedup_table
from .engine import (LoweredKernel, RunStats, descriptor_text, lower,
                     pipeline_kernel, reference_step, run)
from .errors import InstabilityError, ScriptError, ValidationError
from .fieldio import compare_dumps, dump_fields, load_fields, ulp_distance
from .fields import FieldSet, InitialCondition, energy, make_fields, probe
from .ir import StepProgram, build_step_program, program_text, verify
from .params import EPS0, MU0, SimParams, cfl_limit
from .target import Target, detect_target
from .transforms import (PIPELINES, ScheduledProgram, apply_script,
                         parse_script, plan_inplace, preset_script)
from .vtkio import export_vtk, vtk_text

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "EPS0",
    "FieldSet",
    "InitialCondition",
    "InstabilityError",
    "LoweredKernel",
    "MU0",
    "PIPELINES",
    "RunStats",
    "ScheduledProgram",
    "ScriptError",
    "SimParams",
    "StepProgram",
    "Target",
    "ValidationError",
    "apply_script",
    "build_step_program",
    "cfl_limit",
    "compare_dumps",
    "descriptor_text",
    "detect_target",
    "dump_fields",
    "energy",
    "export_vtk",
    "load_fields",
    "lower",
    "make_fields",
    "parse_script",
    "pipeline_kernel",
    "plan_inplace",
    "preset_script",
    "probe",
    "program_text",
    "reference_step",
    "run",
    "run_benchmark",
    "speedup_table",
    "ulp_distance",
    "verify",
    "vtk_text",
    "__version__",
]
