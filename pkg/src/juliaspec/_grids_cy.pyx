# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled lane of the escape-grid kernels.

Operation-for-operation mirror of _grids_py.py; the build pins
-ffp-contract=off so the C arithmetic stays un-fused and the two lanes
produce bit-identical rasters. Keep the expressions in sync with the
numpy lane when editing either file.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BOUNDED = -1

cdef int C_BOUNDED = -1
cdef double OVER2 = 1e300


def julia_band(cnp.int32_t[:, ::1] iters, Py_ssize_t row0, double re_min,
               double dre, double im_max, double dim, double p,
               int max_iter, double rr):
    """Fill a horizontal band of escape iterations for the squared map."""
    cdef Py_ssize_t h = iters.shape[0]
    cdef Py_ssize_t w = iters.shape[1]
    cdef Py_ssize_t r, c
    cdef int n, res
    cdef double zr, zi, ur, ui, tmp, im0
    with nogil:
        for r in range(h):
            im0 = im_max - ((row0 + r) + 0.5) * dim
            for c in range(w):
                zr = re_min + (c + 0.5) * dre
                zi = im0
                res = C_BOUNDED
                for n in range(max_iter + 1):
                    if zr * zr + zi * zi > rr:
                        res = n
                        break
                    ur = ((zr - 1.0) + p) / p
                    ui = zi / p
                    tmp = ur * ur - ui * ui
                    zi = 2.0 * (ur * ui)
                    zr = tmp
                iters[r, c] = res


def ep_band(cnp.int32_t[:, ::1] iters, Py_ssize_t row0, double re_min,
            double dre, double im_max, double dim, double p,
            int max_iter, double rr):
    """Fill a band for the two-term power recursion."""
    cdef Py_ssize_t h = iters.shape[0]
    cdef Py_ssize_t w = iters.shape[1]
    cdef Py_ssize_t r, c
    cdef int k, res
    cdef double ar, ai, br, bi, ma, mb, pr, pi, im0, x
    with nogil:
        for r in range(h):
            im0 = im_max - ((row0 + r) + 0.5) * dim
            for c in range(w):
                ar = re_min + (c + 0.5) * dre
                ai = im0
                br = ar * ar - ai * ai
                bi = 2.0 * (ar * ai)
                res = C_BOUNDED
                for k in range(1, max_iter + 1):
                    ma = ar * ar + ai * ai
                    mb = br * br + bi * bi
                    if mb > OVER2 or (ma > rr and mb > rr):
                        res = k
                        break
                    pr = ar * br - ai * bi
                    pi = ar * bi + ai * br
                    ar = br
                    ai = bi
                    br = 1.0 + (pr - 1.0) / p
                    bi = pi / p
                iters[r, c] = res
