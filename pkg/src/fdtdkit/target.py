"""Execution target descriptor: preferred vector lane widths.

The descriptor drives schedule semantics (default tile sizes, resolution of
`scalable` vector widths); the machine code actually executed is fixed at
build time.  FDTD_TARGET overrides detection for reproducible cross-host
tests.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class Target:
    name: str
    bits: int            # vector register width in bits; 0 means scalar
    scalable: bool = False

    def width(self, precision: str) -> int:
        if self.bits == 0:
            return 1
        return self.bits // (32 if precision == "f32" else 64)


TARGETS = {
    "avx512": Target("avx512", 512),
    "avx2": Target("avx2", 256),
    "sve-512": Target("sve-512", 512, scalable=True),
    "scalar": Target("scalar", 0),
}


def detect_target(environ=None) -> Target:
    """FDTD_TARGET when set, else a cpuinfo scan, else scalar."""
    env = os.environ if environ is None else environ
    name = env.get("FDTD_TARGET")
    if name:
        if name not in TARGETS:
            raise ValidationError(
                "FDTD_TARGET must be one of %s, got %r"
                % (", ".join(sorted(TARGETS)), name))
        return TARGETS[name]
    flags = ""
    try:
        with open("/proc/cpuinfo") as f:
            for line in f:
                if line.startswith("flags"):
                    flags = line
                    break
    except OSError:
        pass
    if " avx512f" in flags:
        return TARGETS["avx512"]
    if " avx2" in flags:
        return TARGETS["avx2"]
    return TARGETS["scalar"]
