# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_kernels_py``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()


cdef inline void _clip(double bx, double by, double dx, double dy,
                       const double[:, ::1] hp, const double[:, ::1] he,
                       double sx, double sy, double *t0, double *t1) noexcept nogil:
    # Cyrus-Beck clip of b + t d (t in [0, 1]) against half-planes shifted by s
    cdef Py_ssize_t j, H = hp.shape[0]
    cdef double lo = 0.0, hi = 1.0, f0, df, t
    for j in range(H):
        f0 = he[j, 0] * (by - hp[j, 1] - sy) - he[j, 1] * (bx - hp[j, 0] - sx)
        df = he[j, 0] * dy - he[j, 1] * dx
        if df == 0.0:
            if f0 < 0.0:
                hi = lo
                break
            continue
        t = -f0 / df
        if df > 0.0:
            if t > lo:
                lo = t
        elif t < hi:
            hi = t
    if hi < lo:
        hi = lo
    t0[0] = lo
    t1[0] = hi


def overlap_values(A, B, kind, K):
    cdef double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[:, ::1] k = np.ascontiguousarray(K, dtype=np.float64)
    cdef Py_ssize_t N = k.shape[0], m = a.shape[0], n, i, j, s
    cdef double[:, ::1] ae = np.ascontiguousarray(np.roll(A, -1, axis=0) - np.asarray(A), dtype=np.float64)
    out_arr = np.zeros(N)
    cdef double[::1] out = out_arr
    cdef double t0, t1, tot, bx, by, dx, dy, p0x, p0y, p1x, p1y, length
    cdef double[:, :, ::1] sg
    cdef double[:, ::1] b, be
    if kind == "length":
        sg = np.ascontiguousarray(B, dtype=np.float64)
        n = sg.shape[0]
        with nogil:
            for i in range(N):
                tot = 0.0
                for s in range(n):
                    dx = sg[s, 1, 0] - sg[s, 0, 0]
                    dy = sg[s, 1, 1] - sg[s, 0, 1]
                    _clip(sg[s, 0, 0] - k[i, 0], sg[s, 0, 1] - k[i, 1], dx, dy,
                          a, ae, 0.0, 0.0, &t0, &t1)
                    tot += (t1 - t0) * sqrt(dx * dx + dy * dy)
                out[i] = tot
        return out_arr
    b = np.ascontiguousarray(B, dtype=np.float64)
    be = np.ascontiguousarray(np.roll(B, -1, axis=0) - np.asarray(B), dtype=np.float64)
    n = b.shape[0]
    with nogil:
        for i in range(N):
            tot = 0.0
            for j in range(m):
                # edge of A against B - k, i.e. half-planes of B shifted by -k
                _clip(a[j, 0], a[j, 1], ae[j, 0], ae[j, 1], b, be,
                      -k[i, 0], -k[i, 1], &t0, &t1)
                p0x = a[j, 0] + t0 * ae[j, 0]
                p0y = a[j, 1] + t0 * ae[j, 1]
                p1x = a[j, 0] + t1 * ae[j, 0]
                p1y = a[j, 1] + t1 * ae[j, 1]
                tot += 0.5 * (p0x * p1y - p0y * p1x)
            for j in range(n):
                bx = b[j, 0] - k[i, 0]
                by = b[j, 1] - k[i, 1]
                _clip(bx, by, be[j, 0], be[j, 1], a, ae, 0.0, 0.0, &t0, &t1)
                p0x = bx + t0 * be[j, 0]
                p0y = by + t0 * be[j, 1]
                p1x = bx + t1 * be[j, 0]
                p1y = by + t1 * be[j, 1]
                tot += 0.5 * (p0x * p1y - p0y * p1x)
            out[i] = tot
    return out_arr


cdef inline Py_ssize_t _pick(const double *cdf, Py_ssize_t m, double u) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = m - 1, mid
    cdef double target = u * cdf[hi]
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] <= target:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline void _point(const double *simp, Py_ssize_t k, Py_ssize_t d,
                        const double *cdf, Py_ssize_t m,
                        const double *u, double *x) noexcept nogil:
    # simp is (m, k + 1, d) row-major, u holds 1 + k uniforms
    cdef Py_ssize_t idx = _pick(cdf, m, u[0])
    cdef const double *s_idx = simp + idx * (k + 1) * d
    cdef Py_ssize_t c, j
    cdef double s[4]
    cdef double w[4]
    cdef double tmp
    for j in range(k):
        s[j] = u[1 + j]
    # insertion sort of at most three numbers
    for j in range(1, k):
        c = j
        while c > 0 and s[c - 1] > s[c]:
            tmp = s[c]
            s[c] = s[c - 1]
            s[c - 1] = tmp
            c -= 1
    if k == 0:
        w[0] = 1.0
    else:
        w[0] = s[0]
        for j in range(1, k):
            w[j] = s[j] - s[j - 1]
        w[k] = 1.0 - s[k - 1]
    for c in range(d):
        tmp = 0.0
        for j in range(k + 1):
            tmp += w[j] * s_idx[j * d + c]
        x[c] = tmp


def mc_accumulate(simp_a, cdf_a, simp_b, cdf_b, double p, UA, UB):
    cdef double[:, :, ::1] sa = np.ascontiguousarray(simp_a, dtype=np.float64)
    cdef double[:, :, ::1] sb = np.ascontiguousarray(simp_b, dtype=np.float64)
    cdef double[::1] ca = np.ascontiguousarray(cdf_a, dtype=np.float64)
    cdef double[::1] cb = np.ascontiguousarray(cdf_b, dtype=np.float64)
    cdef double[:, ::1] ua = np.ascontiguousarray(UA, dtype=np.float64)
    cdef double[:, ::1] ub = np.ascontiguousarray(UB, dtype=np.float64)
    cdef Py_ssize_t n = ua.shape[0], r, c, d = sa.shape[2]
    cdef Py_ssize_t ka = sa.shape[1] - 1, kb = sb.shape[1] - 1
    cdef Py_ssize_t ma = ca.shape[0], mb = cb.shape[0]
    cdef Py_ssize_t wa = ua.shape[1], wb = ub.shape[1]
    cdef const double *psa = &sa[0, 0, 0]
    cdef const double *psb = &sb[0, 0, 0]
    cdef const double *pca = &ca[0]
    cdef const double *pcb = &cb[0]
    cdef const double *pua = &ua[0, 0]
    cdef const double *pub = &ub[0, 0]
    cdef double x[3]
    cdef double y[3]
    cdef double r2, v, tot = 0.0, tot2 = 0.0, comp = 0.0, comp2 = 0.0, t
    cdef int mode = 0
    if p == 1.0:
        mode = 1
    elif p == -1.0:
        mode = 2
    elif p == 2.0:
        mode = 3
    elif p == 3.0:
        mode = 4
    with nogil:
        for r in range(n):
            _point(psa, ka, d, pca, ma, pua + r * wa, x)
            _point(psb, kb, d, pcb, mb, pub + r * wb, y)
            r2 = 0.0
            for c in range(d):
                r2 += (x[c] - y[c]) * (x[c] - y[c])
            if mode == 1:
                v = sqrt(r2)
            elif mode == 2:
                v = 1.0 / sqrt(r2)
            elif mode == 3:
                v = r2
            elif mode == 4:
                v = r2 * sqrt(r2)
            else:
                v = pow(r2, 0.5 * p)
            # Neumaier compensated sums
            t = tot + v
            if fabs(tot) >= fabs(v):
                comp += (tot - t) + v
            else:
                comp += (v - t) + tot
            tot = t
            v = v * v
            t = tot2 + v
            if fabs(tot2) >= fabs(v):
                comp2 += (tot2 - t) + v
            else:
                comp2 += (v - t) + tot2
            tot2 = t
    return tot + comp, tot2 + comp2
