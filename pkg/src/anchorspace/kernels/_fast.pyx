# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled routing kernel.

Mirrors kernels/reference.py operation for operation: identical scalar
arithmetic in identical order (the extension is built with
-ffp-contract=off so the C compiler cannot fuse multiply-adds), identical
tie-breaking, identical scalar-op accounting. Any semantic change must be
made in both files; tests/test_kernels.py asserts bit-exact parity.
"""

import numpy as np

cimport cython
from libc.math cimport sqrt

NORM_L2 = 0
NORM_L1 = 1
NORM_LINF = 2

ALG_GREEDY = 0
ALG_INERTIA = 1

STATUS_DELIVERED = 0
STATUS_LOCAL_MINIMUM = 1
STATUS_TTL = 2
STATUS_NO_NEIGHBOR = 3

DEF COS_TIE_TOL = 1e-12


@cython.cdivision(True)
cdef inline double _full_distance(const double[:, ::1] table, Py_ssize_t row,
                                  const double[::1] dest, int norm, Py_ssize_t m) nogil:
    cdef double s = 0.0, mx = 0.0, d
    cdef Py_ssize_t j
    if norm == 0:
        for j in range(m):
            d = table[row, j] - dest[j]
            s += d * d
        return sqrt(s)
    if norm == 1:
        for j in range(m):
            d = table[row, j] - dest[j]
            s += d if d >= 0.0 else -d
        return s
    for j in range(m):
        d = table[row, j] - dest[j]
        if d < 0.0:
            d = -d
        if d > mx:
            mx = d
    return mx


@cython.cdivision(True)
cdef inline double _sub_distance(const double[:, ::1] table, Py_ssize_t row,
                                 const double[::1] dest, int norm,
                                 const int[::1] sub, Py_ssize_t d_count) nogil:
    cdef double s = 0.0, mx = 0.0, d
    cdef Py_ssize_t i, j
    if norm == 0:
        for i in range(d_count):
            j = sub[i]
            d = table[row, j] - dest[j]
            s += d * d
        return sqrt(s)
    if norm == 1:
        for i in range(d_count):
            j = sub[i]
            d = table[row, j] - dest[j]
            s += d if d >= 0.0 else -d
        return s
    for i in range(d_count):
        j = sub[i]
        d = table[row, j] - dest[j]
        if d < 0.0:
            d = -d
        if d > mx:
            mx = d
    return mx


@cython.cdivision(True)
def run_route(const int[::1] indptr, const int[::1] indices,
              const double[:, ::1] table, const double[::1] dest,
              int source, int destination, int algorithm, double lam,
              int norm, bint use_filter, long ttl):
    """Execute one routing run; returns (status, path, scalar_ops).

    Same contract as kernels.reference.run_route, with adjacency in CSR
    form (ascending neighbor ids within each row).
    """
    cdef Py_ssize_t m = dest.shape[0]
    cdef int current = source
    cdef int previous = -1
    cdef long hops = 0
    cdef long long ops = 0
    cdef bint have_heading = False
    cdef bint sub_active
    cdef Py_ssize_t d_count, kc
    cdef Py_ssize_t i, pos, j
    cdef int v, best_id
    cdef double smax, half, best, dist, gnorm, hnorm, bnorm, fn
    cdef double gj, hj, dj, dot, nn, dn, cosv, best_cos, best_dn, s, om

    buf = np.empty((5, m), dtype=np.float64)
    cdef double[::1] g = buf[0]
    cdef double[::1] h = buf[1]
    cdef double[::1] u = buf[2]
    cdef double[::1] blend = buf[3]
    cdef double[::1] heading = buf[4]
    sub_buf = np.empty(m, dtype=np.intc)
    cdef int[::1] sub = sub_buf

    path = [source]

    while True:
        if current == destination:
            return STATUS_DELIVERED, path, ops
        if hops >= ttl:
            return STATUS_TTL, path, ops

        sub_active = False
        d_count = m
        if use_filter:
            smax = table[current, 0]
            for j in range(1, m):
                if table[current, j] > smax:
                    smax = table[current, j]
            half = smax / 2.0
            kc = 0
            for j in range(m):
                if not (table[current, j] < dest[j] and table[current, j] < half):
                    sub[kc] = <int> j
                    kc += 1
            if 0 < kc < m:
                sub_active = True
                d_count = kc

        if algorithm == ALG_GREEDY:
            if sub_active:
                best = _sub_distance(table, current, dest, norm, sub, d_count)
            else:
                best = _full_distance(table, current, dest, norm, m)
            ops += d_count
            best_id = -1
            for i in range(indptr[current], indptr[current + 1]):
                v = indices[i]
                if sub_active:
                    dist = _sub_distance(table, v, dest, norm, sub, d_count)
                else:
                    dist = _full_distance(table, v, dest, norm, m)
                ops += d_count
                if dist < best:
                    best = dist
                    best_id = v
            if best_id < 0:
                return STATUS_LOCAL_MINIMUM, path, ops
            previous = current
            current = best_id
        else:
            # direction toward the destination
            s = 0.0
            for pos in range(d_count):
                j = sub[pos] if sub_active else pos
                gj = dest[j] - table[current, j]
                s += gj * gj
            gnorm = sqrt(s)
            ops += d_count
            if gnorm > 0.0:
                for pos in range(d_count):
                    j = sub[pos] if sub_active else pos
                    g[pos] = (dest[j] - table[current, j]) / gnorm
            else:
                for pos in range(d_count):
                    g[pos] = 0.0
            # stored heading, re-projected when the filter trimmed dims
            if not have_heading:
                for pos in range(d_count):
                    h[pos] = g[pos]
            elif not sub_active:
                for pos in range(m):
                    h[pos] = heading[pos]
            else:
                s = 0.0
                for pos in range(d_count):
                    hj = heading[sub[pos]]
                    s += hj * hj
                hnorm = sqrt(s)
                ops += d_count
                if hnorm > 0.0:
                    for pos in range(d_count):
                        h[pos] = heading[sub[pos]] / hnorm
                else:
                    for pos in range(d_count):
                        h[pos] = g[pos]
            # blended ideal direction
            om = 1.0 - lam
            s = 0.0
            for pos in range(d_count):
                blend[pos] = lam * g[pos] + om * h[pos]
                s += blend[pos] * blend[pos]
            bnorm = sqrt(s)
            ops += d_count
            if bnorm > 0.0:
                for pos in range(d_count):
                    u[pos] = blend[pos] / bnorm
            else:
                for pos in range(d_count):
                    u[pos] = g[pos]

            best_id = -1
            best_cos = 0.0
            best_dn = 0.0
            for i in range(indptr[current], indptr[current + 1]):
                v = indices[i]
                if v == previous:
                    continue
                dot = 0.0
                nn = 0.0
                for pos in range(d_count):
                    j = sub[pos] if sub_active else pos
                    dj = table[v, j] - table[current, j]
                    dot += dj * u[pos]
                    nn += dj * dj
                ops += 2 * d_count
                dn = sqrt(nn)
                cosv = dot / dn if dn > 0.0 else 0.0
                if best_id < 0 or cosv > best_cos + COS_TIE_TOL:
                    best_id = v
                    best_cos = cosv
                    best_dn = dn
            if best_id < 0:
                return STATUS_NO_NEIGHBOR, path, ops
            if not sub_active:
                # reuse the chosen neighbor's displacement norm
                if best_dn > 0.0:
                    for j in range(m):
                        heading[j] = (table[best_id, j] - table[current, j]) / best_dn
                    have_heading = True
            else:
                s = 0.0
                for j in range(m):
                    dj = table[best_id, j] - table[current, j]
                    s += dj * dj
                fn = sqrt(s)
                ops += m
                if fn > 0.0:
                    for j in range(m):
                        heading[j] = (table[best_id, j] - table[current, j]) / fn
                    have_heading = True
            previous = current
            current = best_id

        path.append(current)
        hops += 1
