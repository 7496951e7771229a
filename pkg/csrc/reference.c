/* Naive reference stepper: one full leapfrog step as plain triple loops.
 *
 * This is the bit-exactness oracle.  It is deliberately written without the
 * kernel macro machinery in kernels.c, so the two implementations share
 * nothing but the update equations themselves: separate source, separate
 * loop style (flat index arithmetic, no hoisted row pointers), separate
 * build flags (-O2, no -march, auto-vectorization off).  -ffp-contract=off
 * is still required so no FMA sneaks in on either side.
 *
 * Step structure: curl updates for Hx, Hy, Hz; the H edge pass (a no-op for
 * a perfect electric conductor, kept as a placeholder); curl updates for
 * Ex, Ey, Ez over the interior; tangential E zeroed on the six outer faces.
 */

#include <Python.h>
#include <stdint.h>

#define REF_STEP(NAME, T)                                                     \
void NAME(T *ex, T *ey, T *ez, T *hx, T *hy, T *hz,                           \
          int64_t nx, int64_t ny, int64_t nz,                                 \
          T ce, T cm, T rx, T ry, T rz)                                       \
{                                                                             \
    const int64_t exs0 = (ny + 1) * (nz + 1), exs1 = nz + 1;                  \
    const int64_t eys0 = ny * (nz + 1),       eys1 = nz + 1;                  \
    const int64_t ezs0 = (ny + 1) * nz,       ezs1 = nz;                      \
    const int64_t hxs0 = ny * nz,             hxs1 = nz;                      \
    const int64_t hys0 = (ny + 1) * nz,       hys1 = nz;                      \
    const int64_t hzs0 = ny * (nz + 1),       hzs1 = nz + 1;                  \
    int64_t i, j, k;                                                          \
                                                                              \
    /* Hx over (nx+1, ny, nz) */                                              \
    for (i = 0; i < nx + 1; ++i)                                              \
        for (j = 0; j < ny; ++j)                                              \
            for (k = 0; k < nz; ++k)                                          \
                hx[i * hxs0 + j * hxs1 + k] += cm *                           \
                    ((ey[i * eys0 + j * eys1 + k + 1]                         \
                      - ey[i * eys0 + j * eys1 + k]) * rz                     \
                   - (ez[i * ezs0 + (j + 1) * ezs1 + k]                       \
                      - ez[i * ezs0 + j * ezs1 + k]) * ry);                   \
                                                                              \
    /* Hy over (nx, ny+1, nz) */                                              \
    for (i = 0; i < nx; ++i)                                                  \
        for (j = 0; j < ny + 1; ++j)                                          \
            for (k = 0; k < nz; ++k)                                          \
                hy[i * hys0 + j * hys1 + k] += cm *                           \
                    ((ez[(i + 1) * ezs0 + j * ezs1 + k]                       \
                      - ez[i * ezs0 + j * ezs1 + k]) * rx                     \
                   - (ex[i * exs0 + j * exs1 + k + 1]                         \
                      - ex[i * exs0 + j * exs1 + k]) * rz);                   \
                                                                              \
    /* Hz over (nx, ny, nz+1) */                                              \
    for (i = 0; i < nx; ++i)                                                  \
        for (j = 0; j < ny; ++j)                                              \
            for (k = 0; k < nz + 1; ++k)                                      \
                hz[i * hzs0 + j * hzs1 + k] += cm *                           \
                    ((ex[i * exs0 + (j + 1) * exs1 + k]                       \
                      - ex[i * exs0 + j * exs1 + k]) * ry                     \
                   - (ey[(i + 1) * eys0 + j * eys1 + k]                       \
                      - ey[i * eys0 + j * eys1 + k]) * rx);                   \
                                                                              \
    /* H edge handling: nothing to correct for a perfect conductor. */       \
                                                                              \
    /* Ex over (nx, [1,ny), [1,nz)) */                                        \
    for (i = 0; i < nx; ++i)                                                  \
        for (j = 1; j < ny; ++j)                                              \
            for (k = 1; k < nz; ++k)                                          \
                ex[i * exs0 + j * exs1 + k] += ce *                           \
                    ((hz[i * hzs0 + j * hzs1 + k]                             \
                      - hz[i * hzs0 + (j - 1) * hzs1 + k]) * ry               \
                   - (hy[i * hys0 + j * hys1 + k]                             \
                      - hy[i * hys0 + j * hys1 + k - 1]) * rz);               \
                                                                              \
    /* Ey over ([1,nx), ny, [1,nz)) */                                        \
    for (i = 1; i < nx; ++i)                                                  \
        for (j = 0; j < ny; ++j)                                              \
            for (k = 1; k < nz; ++k)                                          \
                ey[i * eys0 + j * eys1 + k] += ce *                           \
                    ((hx[i * hxs0 + j * hxs1 + k]                             \
                      - hx[i * hxs0 + j * hxs1 + k - 1]) * rz                 \
                   - (hz[i * hzs0 + j * hzs1 + k]                             \
                      - hz[(i - 1) * hzs0 + j * hzs1 + k]) * rx);             \
                                                                              \
    /* Ez over ([1,nx), [1,ny), nz) */                                        \
    for (i = 1; i < nx; ++i)                                                  \
        for (j = 1; j < ny; ++j)                                              \
            for (k = 0; k < nz; ++k)                                          \
                ez[i * ezs0 + j * ezs1 + k] += ce *                           \
                    ((hy[i * hys0 + j * hys1 + k]                             \
                      - hy[(i - 1) * hys0 + j * hys1 + k]) * rx               \
                   - (hx[i * hxs0 + j * hxs1 + k]                             \
                      - hx[i * hxs0 + (j - 1) * hxs1 + k]) * ry);             \
                                                                              \
    /* Tangential E on the x faces (i = 0 and i = nx): Ey, Ez. */             \
    for (j = 0; j < ny; ++j)                                                  \
        for (k = 0; k < nz + 1; ++k) {                                        \
            ey[j * eys1 + k] = 0;                                             \
            ey[nx * eys0 + j * eys1 + k] = 0;                                 \
        }                                                                     \
    for (j = 0; j < ny + 1; ++j)                                              \
        for (k = 0; k < nz; ++k) {                                            \
            ez[j * ezs1 + k] = 0;                                             \
            ez[nx * ezs0 + j * ezs1 + k] = 0;                                 \
        }                                                                     \
                                                                              \
    /* Tangential E on the y faces (j = 0 and j = ny): Ex, Ez. */             \
    for (i = 0; i < nx; ++i)                                                  \
        for (k = 0; k < nz + 1; ++k) {                                        \
            ex[i * exs0 + k] = 0;                                             \
            ex[i * exs0 + ny * exs1 + k] = 0;                                 \
        }                                                                     \
    for (i = 0; i < nx + 1; ++i)                                              \
        for (k = 0; k < nz; ++k) {                                            \
            ez[i * ezs0 + k] = 0;                                             \
            ez[i * ezs0 + ny * ezs1 + k] = 0;                                 \
        }                                                                     \
                                                                              \
    /* Tangential E on the z faces (k = 0 and k = nz): Ex, Ey. */             \
    for (i = 0; i < nx; ++i)                                                  \
        for (j = 0; j < ny + 1; ++j) {                                        \
            ex[i * exs0 + j * exs1] = 0;                                      \
            ex[i * exs0 + j * exs1 + nz] = 0;                                 \
        }                                                                     \
    for (i = 0; i < nx + 1; ++i)                                              \
        for (j = 0; j < ny; ++j) {                                            \
            ey[i * eys0 + j * eys1] = 0;                                      \
            ey[i * eys0 + j * eys1 + nz] = 0;                                 \
        }                                                                     \
}

REF_STEP(ref_step_f32, float)
REF_STEP(ref_step_f64, double)

static struct PyModuleDef kmod_def = {
    PyModuleDef_HEAD_INIT, KMOD_NAME_STR, NULL, -1, NULL, NULL, NULL, NULL, NULL
};

PyMODINIT_FUNC KMOD_INIT(void)
{
    return PyModule_Create(&kmod_def);
}
