/* Curl update kernels for the staggered-grid solver.
 *
 * One macro instantiates each curl component as a standalone function so the
 * compiler sees literal constant offsets and unit stride along k.  The same
 * source is built twice: once with auto-vectorization disabled (the scalar
 * pipelines) and once with it enabled (the lane-parallel pipelines).  Both
 * builds keep -ffp-contract=off: a fused multiply-add would change the bits
 * relative to the reference stepper.
 *
 * Semantics per grid point, over i in [i0,i1), j in [j0,j1), k in [k0,k1):
 *
 *   out[i][j][k] += coef * ((t1[i+A1I][j+A1J][k+A1K] - t1[i+B1I][j+B1J][k+B1K]) * ia
 *                         - (t2[i+A2I][j+A2J][k+A2K] - t2[i+B2I][j+B2J][k+B2K]) * ib)
 *
 * Arrays are C-contiguous; osN/sNn are element strides of the two leading
 * axes (the k stride is always 1).  Bounds are runtime values so the same
 * function serves full sweeps and single tiles.
 */

#include <Python.h>
#include <stdint.h>

#define CURL_KERNEL(NAME, T, A1I, A1J, A1K, B1I, B1J, B1K,                   \
                    A2I, A2J, A2K, B2I, B2J, B2K)                            \
void NAME(T *out, const T *t1, const T *t2, T coef, T ia, T ib,              \
          int64_t os0, int64_t os1, int64_t s10, int64_t s11,                \
          int64_t s20, int64_t s21,                                          \
          int64_t i0, int64_t i1, int64_t j0, int64_t j1,                    \
          int64_t k0, int64_t k1)                                            \
{                                                                            \
    for (int64_t i = i0; i < i1; ++i) {                                      \
        for (int64_t j = j0; j < j1; ++j) {                                  \
            T *orow = out + i * os0 + j * os1;                               \
            const T *a1 = t1 + (i + A1I) * s10 + (j + A1J) * s11 + A1K;      \
            const T *b1 = t1 + (i + B1I) * s10 + (j + B1J) * s11 + B1K;      \
            const T *a2 = t2 + (i + A2I) * s20 + (j + A2J) * s21 + A2K;      \
            const T *b2 = t2 + (i + B2I) * s20 + (j + B2J) * s21 + B2K;      \
            for (int64_t k = k0; k < k1; ++k)                                \
                orow[k] += coef * ((a1[k] - b1[k]) * ia                      \
                                 - (a2[k] - b2[k]) * ib);                    \
        }                                                                    \
    }                                                                        \
}

/* H updates: forward differences of E. */
CURL_KERNEL(curl_hx_f32, float,  0, 0, 1,  0, 0, 0,  0, 1, 0,  0, 0, 0)
CURL_KERNEL(curl_hx_f64, double, 0, 0, 1,  0, 0, 0,  0, 1, 0,  0, 0, 0)
CURL_KERNEL(curl_hy_f32, float,  1, 0, 0,  0, 0, 0,  0, 0, 1,  0, 0, 0)
CURL_KERNEL(curl_hy_f64, double, 1, 0, 0,  0, 0, 0,  0, 0, 1,  0, 0, 0)
CURL_KERNEL(curl_hz_f32, float,  0, 1, 0,  0, 0, 0,  1, 0, 0,  0, 0, 0)
CURL_KERNEL(curl_hz_f64, double, 0, 1, 0,  0, 0, 0,  1, 0, 0,  0, 0, 0)

/* E updates: backward differences of H over the interior. */
CURL_KERNEL(curl_ex_f32, float,  0, 0, 0,  0, -1, 0,  0, 0, 0,  0, 0, -1)
CURL_KERNEL(curl_ex_f64, double, 0, 0, 0,  0, -1, 0,  0, 0, 0,  0, 0, -1)
CURL_KERNEL(curl_ey_f32, float,  0, 0, 0,  0, 0, -1,  0, 0, 0,  -1, 0, 0)
CURL_KERNEL(curl_ey_f64, double, 0, 0, 0,  0, 0, -1,  0, 0, 0,  -1, 0, 0)
CURL_KERNEL(curl_ez_f32, float,  0, 0, 0,  -1, 0, 0,  0, 0, 0,  0, -1, 0)
CURL_KERNEL(curl_ez_f64, double, 0, 0, 0,  -1, 0, 0,  0, 0, 0,  0, -1, 0)

/* The library is loaded with ctypes, but the build names it like an
 * extension module, so give the import system a valid (empty) init anyway.
 * KMOD_NAME_STR / KMOD_INIT come from setup.py, one pair per build flavor.
 */
static struct PyModuleDef kmod_def = {
    PyModuleDef_HEAD_INIT, KMOD_NAME_STR, NULL, -1, NULL, NULL, NULL, NULL, NULL
};

PyMODINIT_FUNC KMOD_INIT(void)
{
    return PyModule_Create(&kmod_def);
}
