# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""C kernels: same call signatures and arithmetic as _pykernels.

See _pykernels for the documented reference implementation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (M_PI, atan2, ceil, cos, exp, fabs, floor, lgamma, log,
                        sin, sqrt)

cnp.import_array()

BACKEND_NAME = "cython"

cdef double _RESCALE = 1e250
cdef double _INV_RESCALE = 1e-250
cdef double _LOG_RESCALE = log(1e250)


def scatter_profile(masses, long base0, long k, prof, long R, long j0, long L,
                    out):
    cdef const double[::1] mv = np.ascontiguousarray(masses, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(prof, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, lo, hi, base, off, jend = j0 + L
    cdef double m
    with nogil:
        for i in range(mv.shape[0]):
            m = mv[i]
            if m == 0.0:
                continue
            base = base0 + i * k
            lo = base - R
            hi = base + R + 1
            if lo < j0:
                lo = j0
            if hi > jend:
                hi = jend
            if lo >= hi:
                continue
            off = base - R
            for j in range(lo, hi):
                ov[j - j0] += m * pv[j - off]
    return out


def density_at_points(masses, long n_lo, double sigma, xs):
    cdef const double[::1] mv = np.ascontiguousarray(masses, dtype=np.float64)
    xs_arr = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    cdef const double[::1] xv = np.ascontiguousarray(xs_arr)
    out_arr = np.zeros(xs_arr.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t npts = xv.shape[0], nmass = mv.shape[0], i, n, nlo, nhi
    cdef double x, acc, dnn
    cdef double w = 12.0 * sigma
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double norm = 1.0 / (sqrt(2.0 * M_PI) * sigma)
    with nogil:
        for i in range(npts):
            x = xv[i]
            nlo = <Py_ssize_t>ceil(x - w) - n_lo
            nhi = <Py_ssize_t>floor(x + w) - n_lo
            if nlo < 0:
                nlo = 0
            if nhi > nmass - 1:
                nhi = nmass - 1
            acc = 0.0
            for n in range(nlo, nhi + 1):
                dnn = x - <double>(n_lo + n)
                acc += mv[n] * exp(-dnn * dnn * inv2s2)
            ov[i] = acc * norm
    return out_arr


def displacement_block(alpha, long cutoff, long col_lo, long col_hi):
    cdef Py_ssize_t c = cutoff
    if not (0 <= col_lo <= col_hi <= c):
        raise ValueError("column range must satisfy 0 <= col_lo <= col_hi <= cutoff")
    cdef Py_ssize_t ncols = col_hi - col_lo + 1
    W_arr = np.zeros((c + 1, ncols), dtype=np.complex128)
    cdef double complex[:, ::1] W = W_arr
    cdef double complex al = alpha
    cdef double complex I = 1j
    cdef double complex pu, pl
    cdef Py_ssize_t n, d, k, kmax_d
    if al == 0:
        for n in range(col_lo, col_hi + 1):
            W[n, n - col_lo] = 1.0
        return W_arr

    cdef double x = al.real * al.real + al.imag * al.imag
    cdef double la = log(sqrt(x))
    cdef double ph = atan2(al.imag, al.real)
    cdef double S, es, fm1, fm2, f, m, kf, denom, c1, c2, dd, sgn
    with nogil:
        for d in range(0, c + 1):
            dd = <double>d
            S = -0.5 * x + dd * la - 0.5 * lgamma(dd + 1.0)
            es = exp(S)
            fm1 = 1.0
            fm2 = 0.0
            pu = cos(dd * ph) + I * sin(dd * ph)
            sgn = 1.0 if d % 2 == 0 else -1.0
            pl = sgn * (cos(dd * ph) - I * sin(dd * ph))
            kmax_d = c - d
            if kmax_d > col_hi:
                kmax_d = col_hi
            for k in range(0, kmax_d + 1):
                if k > 0:
                    kf = <double>k
                    denom = sqrt(kf * (kf + dd))
                    c1 = (2.0 * kf - 1.0 + dd - x) / denom
                    c2 = sqrt((kf - 1.0) * (kf + dd - 1.0)) / denom
                    f = c1 * fm1 - c2 * fm2
                    fm2 = fm1
                    fm1 = f
                    m = fabs(fm1)
                    if fabs(fm2) > m:
                        m = fabs(fm2)
                    if m > _RESCALE:
                        fm1 *= _INV_RESCALE
                        fm2 *= _INV_RESCALE
                        S += _LOG_RESCALE
                        es = exp(S)
                    elif m < _INV_RESCALE and m > 0.0:
                        fm1 *= _RESCALE
                        fm2 *= _RESCALE
                        S -= _LOG_RESCALE
                        es = exp(S)
                if col_lo <= k <= col_hi:
                    W[k + d, k - col_lo] = pu * (fm1 * es)
                if d >= 1 and col_lo <= k + d <= col_hi:
                    W[k, k + d - col_lo] = pl * (fm1 * es)
    return W_arr
