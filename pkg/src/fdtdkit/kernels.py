"""ctypes bindings for the compiled curl kernels.

Three shared libraries are built at install time from csrc/: a scalar build
of the curl kernels, a simd build of the same source, and the naive
reference stepper.  They are loaded here with ctypes (never imported), so
symbol lookup works no matter how the interpreter was started.
"""

from __future__ import annotations

import ctypes
import importlib.util

import numpy as np

_FLAVORS = {
    "scalar": "fdtdkit._kernels_scalar",
    "simd": "fdtdkit._kernels_simd",
    "reference": "fdtdkit._kernels_reference",
}

CURL_NAMES = ("curl_hx", "curl_hy", "curl_hz", "curl_ex", "curl_ey", "curl_ez")

_libs: dict = {}
_fns: dict = {}


def _ext_path(module_name):
    spec = importlib.util.find_spec(module_name)
    if spec is None or not spec.origin:
        raise ImportError(
            "compiled kernel library %s not found; install the package first "
            "(pip install -e . --no-build-isolation)" % module_name)
    return spec.origin


def _lib(flavor):
    if flavor not in _libs:
        _libs[flavor] = ctypes.CDLL(_ext_path(_FLAVORS[flavor]))
    return _libs[flavor]


def _scalar_ctype(dtype):
    return ctypes.c_float if np.dtype(dtype) == np.float32 else ctypes.c_double


def curl_fn(flavor, name, dtype):
    """Bound kernel for one curl component.

    Signature: fn(out, t1, t2, coef, ia, ib, os0, os1, s10, s11, s20, s21,
    i0, i1, j0, j1, k0, k1) with element strides and half-open bounds.
    """
    suffix = "f32" if np.dtype(dtype) == np.float32 else "f64"
    key = (flavor, name, suffix)
    if key not in _fns:
        fn = getattr(_lib(flavor), "%s_%s" % (name, suffix))
        fn.restype = None
        ct = _scalar_ctype(dtype)
        fn.argtypes = [ctypes.c_void_p] * 3 + [ct] * 3 + [ctypes.c_int64] * 12
        _fns[key] = fn
    return _fns[key]


def ref_step_fn(dtype):
    """Bound naive stepper: fn(ex, ey, ez, hx, hy, hz, nx, ny, nz, ce, cm,
    rx, ry, rz) advancing the fields one full step."""
    suffix = "f32" if np.dtype(dtype) == np.float32 else "f64"
    key = ("reference", "ref_step", suffix)
    if key not in _fns:
        fn = getattr(_lib("reference"), "ref_step_%s" % suffix)
        fn.restype = None
        ct = _scalar_ctype(dtype)
        fn.argtypes = [ctypes.c_void_p] * 6 + [ctypes.c_int64] * 3 + [ct] * 5
        _fns[key] = fn
    return _fns[key]


def leading_strides(arr):
    """Element strides of the two leading axes of a C-contiguous 3D array."""
    if not arr.flags.c_contiguous:
        raise ValueError("kernel arrays must be C-contiguous")
    return arr.shape[1] * arr.shape[2], arr.shape[2]
