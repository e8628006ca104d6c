# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid scan + Newton for bilinear roots (same contract as ``_oracle_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _bil(double c0, double c1, double c2, double c3, double p, double f) nogil:
    return c0 + c1 * p + c2 * f + c3 * p * f


def scan_roots(coef, int n, double tol, int max_iter):
    cdef double[:, ::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    cdef double a00 = c[0, 0], a01 = c[0, 1], a10 = c[1, 0], a11 = c[1, 1]
    cdef double a20 = c[2, 0], a21 = c[2, 1], a30 = c[3, 0], a31 = c[3, 1]
    cdef double h = 2.0 / (n - 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vb = np.empty((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vg = np.empty((n, n))
    cdef int i, j, k, it
    cdef double p, f, mnb, mxb, mng, mxg, v, f0, f1, j00, j01, j10, j11, det
    cdef bint ok
    cdef list out = []
    cdef int failed = 0
    for i in range(n):
        p = -1.0 + i * h
        if i == n - 1:
            p = 1.0
        for j in range(n):
            f = -1.0 + j * h
            if j == n - 1:
                f = 1.0
            vb[i, j] = _bil(a00, a10, a20, a30, p, f)
            vg[i, j] = _bil(a01, a11, a21, a31, p, f)
    for i in range(n - 1):
        for j in range(n - 1):
            mnb = vb[i, j]; mxb = mnb
            mng = vg[i, j]; mxg = mng
            for k in range(1, 4):
                v = vb[i + (k & 1), j + (k >> 1)]
                if v < mnb: mnb = v
                if v > mxb: mxb = v
                v = vg[i + (k & 1), j + (k >> 1)]
                if v < mng: mng = v
                if v > mxg: mxg = v
            if not (mnb <= 0 and mxb >= 0 and mng <= 0 and mxg >= 0):
                continue
            p = -1.0 + i * h + 0.5 * h
            f = -1.0 + j * h + 0.5 * h
            ok = False
            for it in range(max_iter):
                f0 = _bil(a00, a10, a20, a30, p, f)
                f1 = _bil(a01, a11, a21, a31, p, f)
                if fabs(f0) <= tol and fabs(f1) <= tol:
                    ok = True
                    break
                j00 = a10 + a30 * f
                j01 = a20 + a30 * p
                j10 = a11 + a31 * f
                j11 = a21 + a31 * p
                det = j00 * j11 - j01 * j10
                if det == 0.0:
                    break
                p -= (j11 * f0 - j01 * f1) / det
                f -= (-j10 * f0 + j00 * f1) / det
                if not (fabs(p) < 4.0 and fabs(f) < 4.0):
                    break
            if ok:
                out.append((p, f))
            else:
                failed += 1
    return np.array(out, dtype=np.float64).reshape(-1, 2), failed
