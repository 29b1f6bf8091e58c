# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Same algorithms and signatures as ``_pykernels``; the per-sample reductions run
in a fixed sequential order so results do not depend on ``num_threads``.
"""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport cos, sin, sqrt, fabs, M_PI

cdef enum:
    TRAPEZOID_PANELS = 34
    HANKEL_TERMS = 12

cdef double SERIES_MAX = 8.0
cdef double HANKEL_MIN = 20.0

cdef double _HANKEL_P[HANKEL_TERMS]
cdef double _HANKEL_Q[HANKEL_TERMS]
cdef double _TRAP_COS[TRAPEZOID_PANELS + 1]


cdef void _init_tables():
    cdef double a[2 * HANKEL_TERMS]
    cdef int k
    a[0] = 1.0
    for k in range(1, 2 * HANKEL_TERMS):
        a[k] = a[k - 1] * -((2.0 * k - 1.0) ** 2) / (k * 8.0)
    for k in range(HANKEL_TERMS):
        _HANKEL_P[k] = a[2 * k] * (1.0 if k % 2 == 0 else -1.0)
        _HANKEL_Q[k] = a[2 * k + 1] * (1.0 if k % 2 == 0 else -1.0)
    for k in range(TRAPEZOID_PANELS + 1):
        _TRAP_COS[k] = cos(M_PI * k / TRAPEZOID_PANELS)


_init_tables()


cdef inline double _j0(double z) noexcept nogil:
    cdef double q, term, total, comp, t, s, inv2, p, qq, chi
    cdef int k
    z = fabs(z)
    if z <= SERIES_MAX:
        q = -0.25 * z * z
        term = 1.0
        total = 0.0
        comp = 0.0
        k = 0
        while True:
            t = total + term
            if fabs(total) >= fabs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
            k += 1
            term *= q / (k * k)
            if fabs(term) < 1e-18:
                break
        return total + comp
    if z < HANKEL_MIN:
        s = 0.5 * (cos(z) + cos(-z))
        for k in range(1, TRAPEZOID_PANELS):
            s += cos(z * _TRAP_COS[k])
        return s / TRAPEZOID_PANELS
    inv2 = 1.0 / (z * z)
    p = 0.0
    qq = 0.0
    for k in range(HANKEL_TERMS - 1, -1, -1):
        p = p * inv2 + _HANKEL_P[k]
        qq = qq * inv2 + _HANKEL_Q[k]
    qq /= z
    chi = z - 0.25 * M_PI
    return sqrt(2.0 / (M_PI * z)) * (p * cos(chi) - qq * sin(chi))


def j0(double z):
    """Scalar Bessel J0 (no input validation)."""
    return _j0(z)


def j0_array(z):
    """Vectorized Bessel J0 over a float array (no input validation)."""
    arr = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(arr)
    cdef const double[::1] src = arr.reshape(-1)
    cdef double[::1] dst = out.reshape(-1)
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _j0(src[i])
    return out


def m1_bessel_sums(x):
    """Return (sum_{n,j,k,l} J0(d(x_n - x_k, x_j - x_l)), sum_{n,j} J0(d(x_n, x_j)))."""
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] xv = xa
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t npairs = n * (n - 1) // 2 + 1
    vals_arr = np.empty(npairs)
    cnts_arr = np.empty(npairs)
    cdef double[::1] vals = vals_arr
    cdef double[::1] cnts = cnts_arr
    cdef Py_ssize_t i, j, u, v, idx
    cdef double quad = 0.0, qcomp = 0.0, pair = 0.0, pcomp = 0.0
    cdef double term, t, d
    with nogil:
        vals[0] = 0.0
        cnts[0] = <double>n
        idx = 1
        for i in range(n):
            for j in range(i + 1, n):
                d = xv[i] - xv[j]
                vals[idx] = d * d
                cnts[idx] = 2.0
                idx += 1
        # symmetric in (u, v): visit u <= v once
        for u in range(npairs):
            for v in range(u, npairs):
                term = cnts[u] * cnts[v] * _j0(sqrt(vals[u] + vals[v]))
                if v != u:
                    term *= 2.0
                t = quad + term
                if fabs(quad) >= fabs(term):
                    qcomp += (quad - t) + term
                else:
                    qcomp += (term - t) + quad
                quad = t
        for i in range(n):
            for j in range(n):
                term = _j0(sqrt(xv[i] * xv[i] + xv[j] * xv[j]))
                t = pair + term
                if fabs(pair) >= fabs(term):
                    pcomp += (pair - t) + term
                else:
                    pcomp += (term - t) + pair
                pair = t
    return quad + qcomp, pair + pcomp


cdef double _discrepancy_one(const double[:, :, ::1] X, Py_ssize_t r,
                             const double[:, ::1] nodes,
                             const double[::1] weights,
                             double target) noexcept nogil:
    cdef Py_ssize_t N = X.shape[1]
    cdef Py_ssize_t m = X.shape[2]
    cdef Py_ssize_t Q = nodes.shape[0]
    cdef Py_ssize_t q, k, j
    cdef double ca, sa, cb, sb, ta, tb, re, im, acc = 0.0
    cdef double inv_n = 1.0 / N
    for q in range(Q):
        ca = 0.0
        sa = 0.0
        cb = 0.0
        sb = 0.0
        for k in range(N):
            ta = 0.0
            tb = 0.0
            for j in range(m):
                ta = ta + nodes[q, j] * X[r, k, j]
                tb = tb + nodes[q, m + j] * X[r, k, j]
            ca = ca + cos(ta)
            sa = sa + sin(ta)
            cb = cb + cos(tb)
            sb = sb + sin(tb)
        ca = ca * inv_n
        sa = sa * inv_n
        cb = cb * inv_n
        sb = sb * inv_n
        re = ca * cb - sa * sb - target
        im = ca * sb + sa * cb
        acc = acc + weights[q] * (re * re + im * im)
    return acc


def ecf_discrepancy_batch(X, nodes, weights, double target, int num_threads=1):
    """Weighted node sum of |ecf(a) ecf(b) - target|^2 for each sample in a batch.

    ``X`` has shape (R, N, m), ``nodes`` (Q, 2m) holding the concatenated
    (a, b) pairs.
    """
    cdef const double[:, :, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] nv = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t R = xv.shape[0]
    out = np.empty(R)
    cdef double[::1] ov = out
    cdef Py_ssize_t r
    if num_threads < 1:
        num_threads = 1
    with nogil:
        for r in prange(R, num_threads=num_threads, schedule="static"):
            ov[r] = _discrepancy_one(xv, r, nv, wv, target)
    return out
