# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled finite-model kernels; mirrors _pykernel exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_batch(mat, vec, pts, mod):
    cdef cnp.int64_t[:, ::1] m = np.ascontiguousarray(mat, dtype=np.int64)
    cdef cnp.int64_t[::1] v = np.ascontiguousarray(vec, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] p = np.ascontiguousarray(pts, dtype=np.int64)
    cdef cnp.int64_t q = mod
    cdef Py_ssize_t n = p.shape[0], d = p.shape[1], i, r, c
    cdef cnp.int64_t acc
    out_arr = np.empty((n, d), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    for i in range(n):
        for r in range(d):
            acc = v[r]
            for c in range(d):
                acc += m[r, c] * p[i, c]
            out[i, r] = acc % q
    return out_arr


def orbit_iterate(mat, vec, x, steps, mod):
    cdef cnp.int64_t[:, ::1] m = np.ascontiguousarray(mat, dtype=np.int64)
    cdef cnp.int64_t[::1] v = np.ascontiguousarray(vec, dtype=np.int64)
    cdef cnp.int64_t[::1] x0 = np.ascontiguousarray(x, dtype=np.int64)
    cdef cnp.int64_t q = mod
    cdef Py_ssize_t nsteps = steps, d = x0.shape[0], t, r, c
    cdef cnp.int64_t acc
    out_arr = np.empty((nsteps + 1, d), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    for r in range(d):
        out[0, r] = x0[r] % q
    for t in range(nsteps):
        for r in range(d):
            acc = v[r]
            for c in range(d):
                acc += m[r, c] * out[t, c]
            out[t + 1, r] = acc % q
    return out_arr


cdef inline int _point_ok(cnp.int64_t[:, :, ::1] mats, cnp.int64_t[:, ::1] vecs,
                          cnp.int64_t[:, ::1] proj, cnp.int64_t mult,
                          cnp.int64_t q, cnp.int64_t *x, cnp.int64_t *y,
                          Py_ssize_t d, Py_ssize_t nproj) nogil:
    cdef Py_ssize_t g, r, c
    cdef cnp.int64_t acc, px, py
    for g in range(mats.shape[0]):
        for r in range(d):
            acc = vecs[g, r]
            for c in range(d):
                acc += mats[g, r, c] * x[c]
            y[r] = acc % q
        for r in range(nproj):
            px = 0
            py = 0
            for c in range(d):
                px += proj[r, c] * x[c]
                py += proj[r, c] * y[c]
            if (px % q) * mult % q != (py % q) * mult % q:
                return 0
    return 1


def invariance_scan_range(mats, vecs, proj, mult, mod, scale, base, start, count):
    cdef cnp.int64_t[:, :, ::1] m = np.ascontiguousarray(mats, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] v = np.ascontiguousarray(vecs, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] pr = np.ascontiguousarray(proj, dtype=np.int64)
    cdef cnp.int64_t mu = mult, q = mod, sc = scale, b = base
    cdef cnp.int64_t t0 = start, cnt = count, t, rem
    cdef Py_ssize_t d = m.shape[1], k
    cdef cnp.int64_t[::1] x = np.empty(d, dtype=np.int64)
    cdef cnp.int64_t[::1] y = np.empty(d, dtype=np.int64)
    cdef long long hit = -1
    with nogil:
        for t in range(t0, t0 + cnt):
            rem = t
            for k in range(d):
                x[k] = (sc * (rem % b)) % q
                rem = rem // b
            if not _point_ok(m, v, pr, mu, q, &x[0], &y[0], d, pr.shape[0]):
                hit = t
                break
    return int(hit)


def invariance_scan_points(mats, vecs, proj, mult, mod, pts):
    cdef cnp.int64_t[:, :, ::1] m = np.ascontiguousarray(mats, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] v = np.ascontiguousarray(vecs, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] pr = np.ascontiguousarray(proj, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] p = np.ascontiguousarray(pts, dtype=np.int64)
    cdef cnp.int64_t mu = mult, q = mod
    cdef Py_ssize_t d = m.shape[1], n = p.shape[0], i, k
    cdef cnp.int64_t[::1] x = np.empty(d, dtype=np.int64)
    cdef cnp.int64_t[::1] y = np.empty(d, dtype=np.int64)
    cdef long long hit = -1
    with nogil:
        for i in range(n):
            for k in range(d):
                x[k] = p[i, k]
            if not _point_ok(m, v, pr, mu, q, &x[0], &y[0], d, pr.shape[0]):
                hit = i
                break
    return int(hit)
