"""Pure-Python routing kernel: the reference semantics.

The compiled kernel in ``_fast.pyx`` mirrors this module operation for
operation. Every floating-point value is accumulated with scalar
arithmetic in ascending component order so both backends produce
bit-identical paths and counters; keep any edit here in lockstep with the
.pyx file.

Scalar-operation accounting (the documented cost model): the counter
grows by the vector length for every inner-product or norm evaluation.
Component-wise adds/scales, comparisons, anchor filtering, and subset
projection are free. Per hop over d live dimensions with k scanned
neighbors this gives:

* greedy:  (k + 1) * d                  (one distance per neighbor, plus
                                         the current-to-destination one)
* inertia: d * (2 + 2k) [+ d + m]       (goal-direction norm and blend
                                         norm, dot+norm per eligible
                                         neighbor; with the per-hop filter
                                         active, re-projecting a stored
                                         heading adds d and the full-space
                                         heading update adds m)
"""

from __future__ import annotations

from math import sqrt
from typing import Sequence

NORM_L2 = 0
NORM_L1 = 1
NORM_LINF = 2

ALG_GREEDY = 0
ALG_INERTIA = 1

STATUS_DELIVERED = 0
STATUS_LOCAL_MINIMUM = 1
STATUS_TTL = 2
STATUS_NO_NEIGHBOR = 3

COSINE_TIE_TOL = 1e-12


def vec_distance(a: Sequence[float], b: Sequence[float], norm: int) -> float:
    """Norm of (a - b), accumulated in ascending component order."""
    if norm == NORM_L2:
        s = 0.0
        for j in range(len(a)):
            d = a[j] - b[j]
            s += d * d
        return sqrt(s)
    if norm == NORM_L1:
        s = 0.0
        for j in range(len(a)):
            d = a[j] - b[j]
            s += d if d >= 0.0 else -d
        return s
    m = 0.0
    for j in range(len(a)):
        d = a[j] - b[j]
        if d < 0.0:
            d = -d
        if d > m:
            m = d
    return m


def _sub_distance(a, b, norm: int, sub: Sequence[int]) -> float:
    if norm == NORM_L2:
        s = 0.0
        for j in sub:
            d = a[j] - b[j]
            s += d * d
        return sqrt(s)
    if norm == NORM_L1:
        s = 0.0
        for j in sub:
            d = a[j] - b[j]
            s += d if d >= 0.0 else -d
        return s
    m = 0.0
    for j in sub:
        d = a[j] - b[j]
        if d < 0.0:
            d = -d
        if d > m:
            m = d
    return m


def filter_kept_indices(sender: Sequence[float], dest: Sequence[float]) -> list[int]:
    """Per-hop anchor filter; see coords.filter_anchors for the rule."""
    m = len(sender)
    smax = sender[0]
    for j in range(1, m):
        if sender[j] > smax:
            smax = sender[j]
    half = smax / 2.0
    kept = [j for j in range(m) if not (sender[j] < dest[j] and sender[j] < half)]
    if not kept:
        return list(range(m))
    return kept


def run_route(
    adjacency: Sequence[Sequence[int]],
    table: Sequence[Sequence[float]],
    dest: Sequence[float],
    source: int,
    destination: int,
    algorithm: int,
    lam: float,
    norm: int,
    use_filter: bool,
    ttl: int,
):
    """Execute one routing run; returns (status, path, scalar_ops).

    ``table`` rows are per-node coordinates in the static policy space
    (any subset projection is already applied); ``dest`` is the
    destination's row. Neighbor lists must be ascending so float ties
    resolve to the lowest node id.
    """
    m = len(dest)
    path = [source]
    current = source
    previous = -1
    heading: list[float] | None = None
    hops = 0
    ops = 0

    while True:
        if current == destination:
            return STATUS_DELIVERED, path, ops
        if hops >= ttl:
            return STATUS_TTL, path, ops

        cur = table[current]
        sub = None
        if use_filter:
            kept = filter_kept_indices(cur, dest)
            if len(kept) < m:
                sub = kept
        d = m if sub is None else len(sub)
        neighbors = adjacency[current]

        if algorithm == ALG_GREEDY:
            if sub is None:
                best = vec_distance(cur, dest, norm)
            else:
                best = _sub_distance(cur, dest, norm, sub)
            ops += d
            best_id = -1
            for v in neighbors:
                row = table[v]
                if sub is None:
                    dist = vec_distance(row, dest, norm)
                else:
                    dist = _sub_distance(row, dest, norm, sub)
                ops += d
                if dist < best:
                    best = dist
                    best_id = v
            if best_id < 0:
                return STATUS_LOCAL_MINIMUM, path, ops
            previous = current
            current = best_id
        else:
            dims = range(m) if sub is None else sub
            # direction toward the destination
            s = 0.0
            for j in dims:
                gj = dest[j] - cur[j]
                s += gj * gj
            gnorm = sqrt(s)
            ops += d
            if gnorm > 0.0:
                g = [(dest[j] - cur[j]) / gnorm for j in dims]
            else:
                g = [0.0] * d
            # stored heading, re-projected when the filter trimmed dims
            if heading is None:
                h = g
            elif sub is None:
                h = heading
            else:
                s = 0.0
                for j in sub:
                    hj = heading[j]
                    s += hj * hj
                hnorm = sqrt(s)
                ops += d
                if hnorm > 0.0:
                    h = [heading[j] / hnorm for j in sub]
                else:
                    h = g
            # blended ideal direction
            blend = [lam * g[i] + (1.0 - lam) * h[i] for i in range(d)]
            s = 0.0
            for i in range(d):
                s += blend[i] * blend[i]
            bnorm = sqrt(s)
            ops += d
            u = [blend[i] / bnorm for i in range(d)] if bnorm > 0.0 else g

            best_id = -1
            best_cos = 0.0
            best_dn = 0.0
            for v in neighbors:
                if v == previous:
                    continue
                row = table[v]
                dot = 0.0
                nn = 0.0
                i = 0
                for j in dims:
                    dj = row[j] - cur[j]
                    dot += dj * u[i]
                    nn += dj * dj
                    i += 1
                ops += 2 * d
                dn = sqrt(nn)
                cos = dot / dn if dn > 0.0 else 0.0
                if best_id < 0 or cos > best_cos + COSINE_TIE_TOL:
                    best_id = v
                    best_cos = cos
                    best_dn = dn
            if best_id < 0:
                return STATUS_NO_NEIGHBOR, path, ops
            row = table[best_id]
            if sub is None:
                # reuse the chosen neighbor's displacement norm
                if best_dn > 0.0:
                    heading = [(row[j] - cur[j]) / best_dn for j in range(m)]
            else:
                s = 0.0
                for j in range(m):
                    dj = row[j] - cur[j]
                    s += dj * dj
                fn = sqrt(s)
                ops += m
                if fn > 0.0:
                    heading = [(row[j] - cur[j]) / fn for j in range(m)]
            previous = current
            current = best_id

        path.append(current)
        hops += 1
