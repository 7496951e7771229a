"""Build script for the native update kernels.

kernels.c is compiled twice from the same source: a scalar build with
auto-vectorization disabled and a simd build that lets the compiler emit
vector code.  The transform pipeline picks one or the other per loop at
lowering time.  reference.c holds the naive oracle stepper and is built
separately with plainer flags.  All three keep -ffp-contract=off: fused
multiply-add would silently change results between the builds.
"""

from setuptools import Extension, setup

CONTRACT_OFF = "-ffp-contract=off"
NO_AUTOVEC = ["-fno-tree-vectorize", "-fno-tree-slp-vectorize"]


def kernel_ext(name, source, extra):
    mod = name.rsplit(".", 1)[-1]
    return Extension(
        name,
        sources=[source],
        define_macros=[
            ("KMOD_NAME_STR", '"%s"' % mod),
            ("KMOD_INIT", "PyInit_%s" % mod),
        ],
        extra_compile_args=extra,
    )


setup(
    ext_modules=[
        kernel_ext(
            "fdtdkit._kernels_scalar",
            "csrc/kernels.c",
            ["-O3", "-march=native", CONTRACT_OFF] + NO_AUTOVEC,
        ),
        kernel_ext(
            "fdtdkit._kernels_simd",
            "csrc/kernels.c",
            ["-O3", "-march=native", CONTRACT_OFF],
        ),
        kernel_ext(
            "fdtdkit._kernels_reference",
            "csrc/reference.c",
            ["-O2", CONTRACT_OFF] + NO_AUTOVEC,
        ),
    ]
)
