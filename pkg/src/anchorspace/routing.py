"""Per-hop routing over any coordinate space: pure greedy and
inertia-greedy, with optional per-hop anchor filtering, coordinate-subset
projection, and exact arithmetic-cost accounting.

Both algorithms need only comparisons, inner products and norms, so the
same code routes over classical 2D positions and over n-dimensional
anchor-distance coordinates. The step-level semantics (tie-breaking,
tolerance, cost model) are fixed in kernels/reference.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .coords import CoordinateSystem, CoordLike, Norm, _as_vector
from .kernels import reference as _ref
from .topology import Topology


class Algorithm(Enum):
    GREEDY = "greedy"
    INERTIA = "inertia"


class Space(Enum):
    CLASSICAL_2D = "2d"
    MULTI_DIM = "md"


class RouteStatus(Enum):
    DELIVERED = _ref.STATUS_DELIVERED
    DROPPED_LOCAL_MINIMUM = _ref.STATUS_LOCAL_MINIMUM
    DROPPED_TTL = _ref.STATUS_TTL
    DROPPED_NO_NEIGHBOR = _ref.STATUS_NO_NEIGHBOR


_STATUS_BY_CODE = {s.value: s for s in RouteStatus}


@dataclass(frozen=True)
class RoutingPolicy:
    """Algorithm plus coordinate-space selection for route().

    ``lam`` blends the destination direction into the kept heading for
    INERTIA (1.0 = pure direction-greedy, ignore heading). ``subset``
    statically restricts routing to the listed anchor indices;
    ``use_filter`` additionally re-selects anchors at every hop. Both are
    meaningful only in the multi-dimensional space.
    """

    algorithm: Algorithm = Algorithm.GREEDY
    lam: float = 0.5
    space: Space = Space.MULTI_DIM
    norm: Norm = Norm.L2
    use_filter: bool = False
    subset: Optional[tuple[int, ...]] = None
    ttl: int = 10_000

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if self.ttl < 1:
            raise ValueError(f"ttl must be >= 1, got {self.ttl}")
        if self.subset is not None:
            object.__setattr__(self, "subset", tuple(int(i) for i in self.subset))
            if not self.subset:
                raise ValueError("subset must be nonempty when given")
            if len(set(self.subset)) != len(self.subset):
                raise ValueError(f"subset indices must be distinct, got {self.subset}")
        if self.space is Space.CLASSICAL_2D and (self.use_filter or self.subset is not None):
            raise ValueError("anchor filtering/subsets require the multi-dimensional space")

    @property
    def label(self) -> str:
        alg = (
            "greedy"
            if self.algorithm is Algorithm.GREEDY
            else f"inertia{self.lam:.2f}"
        )
        suffix = "-filter" if self.use_filter else ""
        if self.subset is not None:
            suffix += f"-sub{len(self.subset)}"
        return f"{alg}-{self.space.value}{suffix}"


@dataclass
class RoutingState:
    """Mutable per-message state carried between step decisions."""

    current: int
    previous: Optional[int] = None
    heading: Optional[np.ndarray] = None
    hops_used: int = 0
    scalar_ops: int = 0


@dataclass(frozen=True)
class RoutingOutcome:
    status: RouteStatus
    path: tuple[int, ...]
    scalar_ops: int
    destination: int

    @property
    def source(self) -> int:
        return self.path[0]

    @property
    def delivered(self) -> bool:
        return self.status is RouteStatus.DELIVERED

    @property
    def hops(self) -> int:
        return len(self.path) - 1


def greedy_step(
    current_coord: CoordLike,
    dest_coord: CoordLike,
    neighbor_coords: Sequence[tuple[int, CoordLike]],
    norm: Norm = Norm.L2,
) -> Optional[int]:
    """Neighbor strictly closest to the destination, or None at a local
    minimum. Ties break toward the lowest node id."""
    cur = _as_vector(current_coord, "current_coord").tolist()
    dst = _as_vector(dest_coord, "dest_coord").tolist()
    if len(cur) != len(dst):
        raise ValueError(f"coordinate lengths differ: {len(cur)} vs {len(dst)}")
    best = _ref.vec_distance(cur, dst, norm.code)
    best_id: Optional[int] = None
    for node, coord in neighbor_coords:
        vec = _as_vector(coord, f"neighbor {node}").tolist()
        if len(vec) != len(dst):
            raise ValueError(f"neighbor {node} coordinate length mismatch")
        dist = _ref.vec_distance(vec, dst, norm.code)
        if dist < best or (dist == best and best_id is not None and node < best_id):
            best = dist
            best_id = node
    return best_id


def inertia_step(
    state: RoutingState,
    current_coord: CoordLike,
    dest_coord: CoordLike,
    neighbor_coords: Sequence[tuple[int, CoordLike]],
    lam: float,
    norm: Norm = Norm.L2,
) -> Optional[tuple[int, np.ndarray]]:
    """One inertia-greedy decision.

    Blends the unit direction toward the destination (weight ``lam``) with
    the stored heading, then picks the neighbor (excluding
    ``state.previous``) whose displacement best aligns with the blend;
    cosine ties within 1e-12 resolve to the lowest id. Non-progress moves
    are allowed; only a node with no eligible neighbor returns None.
    Returns the chosen node and the updated unit heading. ``norm`` is
    accepted for signature symmetry with greedy_step; alignment is
    inner-product based and norm-independent.
    """
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    cur = _as_vector(current_coord, "current_coord").tolist()
    dst = _as_vector(dest_coord, "dest_coord").tolist()
    m = len(cur)
    if m != len(dst):
        raise ValueError(f"coordinate lengths differ: {m} vs {len(dst)}")

    s = 0.0
    for j in range(m):
        gj = dst[j] - cur[j]
        s += gj * gj
    gnorm = math.sqrt(s)
    g = [(dst[j] - cur[j]) / gnorm for j in range(m)] if gnorm > 0.0 else [0.0] * m
    h = g if state.heading is None else list(state.heading)
    if len(h) != m:
        raise ValueError(f"heading length {len(h)} does not match coordinates {m}")
    blend = [lam * g[j] + (1.0 - lam) * h[j] for j in range(m)]
    s = 0.0
    for j in range(m):
        s += blend[j] * blend[j]
    bnorm = math.sqrt(s)
    u = [blend[j] / bnorm for j in range(m)] if bnorm > 0.0 else g

    candidates = sorted(
        ((node, _as_vector(coord, f"neighbor {node}").tolist()) for node, coord in neighbor_coords),
        key=lambda item: item[0],
    )
    best_id = -1
    best_cos = 0.0
    best_dn = 0.0
    best_vec: list[float] = []
    for node, vec in candidates:
        if len(vec) != m:
            raise ValueError(f"neighbor {node} coordinate length mismatch")
        if state.previous is not None and node == state.previous:
            continue
        dot = 0.0
        nn = 0.0
        for j in range(m):
            dj = vec[j] - cur[j]
            dot += dj * u[j]
            nn += dj * dj
        dn = math.sqrt(nn)
        cos = dot / dn if dn > 0.0 else 0.0
        if best_id < 0 or cos > best_cos + _ref.COSINE_TIE_TOL:
            best_id = node
            best_cos = cos
            best_dn = dn
            best_vec = vec
    if best_id < 0:
        return None
    if best_dn > 0.0:
        heading = np.array([(best_vec[j] - cur[j]) / best_dn for j in range(m)])
    elif state.heading is not None:
        heading = np.asarray(state.heading, dtype=np.float64)
    else:
        heading = np.asarray(g, dtype=np.float64)
    return best_id, heading


def _prepare_space(
    topology: Topology,
    policy: RoutingPolicy,
    source: int,
    destination: int,
    system: Optional[CoordinateSystem],
) -> np.ndarray:
    """Effective coordinate table for one route: static subset applied,
    then anchors unreachable from the source or destination dropped
    (hop-count mode leaves UNREACHABLE components; distances over them
    are undefined, so those anchors cannot take part in the run)."""
    if policy.space is Space.CLASSICAL_2D:
        if system is not None:
            raise ValueError("CLASSICAL_2D routes over node positions; pass system=None")
        return topology.positions
    if system is None:
        raise ValueError("MULTI_DIM routing requires a CoordinateSystem")
    if system.node_count != topology.node_count:
        raise ValueError(
            f"coordinate table covers {system.node_count} nodes, "
            f"topology has {topology.node_count}"
        )
    table = system.table
    if policy.subset is not None:
        for i in policy.subset:
            if not (0 <= i < system.n_anchors):
                raise ValueError(
                    f"subset index {i} out of range [0, {system.n_anchors})"
                )
        table = np.ascontiguousarray(table[:, list(policy.subset)])
    finite = np.isfinite(table[source]) & np.isfinite(table[destination])
    if not finite.all():
        table = np.ascontiguousarray(table[:, np.flatnonzero(finite)])
    return table


def route(
    topology: Topology,
    policy: RoutingPolicy,
    source: int,
    destination: int,
    system: Optional[CoordinateSystem] = None,
    backend: Optional[str] = None,
) -> RoutingOutcome:
    """Route one message; pure function of its arguments.

    Delivery is detected by node-id equality (hop-count coordinates are
    not injective). With ``use_filter``, the anchor filter is recomputed
    at every hop on the post-subset coordinates. ``backend`` forces the
    compiled or pure-Python kernel; both give identical results.
    """
    topology.check_node(source)
    topology.check_node(destination)
    table = _prepare_space(topology, policy, source, destination, system)
    if source == destination:
        return RoutingOutcome(RouteStatus.DELIVERED, (source,), 0, destination)
    if table.shape[1] == 0:
        # every anchor unreachable: no coordinate space to make progress in
        return RoutingOutcome(RouteStatus.DROPPED_LOCAL_MINIMUM, (source,), 0, destination)

    name = backend or kernels.DEFAULT_BACKEND
    if name == "cython":
        if kernels.fast is None:
            raise ValueError("compiled kernel requested but not built")
        indptr, indices = topology.csr_adjacency
        dest_row = np.ascontiguousarray(table[destination])
        code, path, ops = kernels.fast.run_route(
            indptr,
            indices,
            table,
            dest_row,
            source,
            destination,
            _ALG_CODES[policy.algorithm],
            policy.lam,
            policy.norm.code,
            policy.use_filter,
            policy.ttl,
        )
    elif name == "python":
        rows = table.tolist()
        code, path, ops = _ref.run_route(
            topology.adjacency,
            rows,
            rows[destination],
            source,
            destination,
            _ALG_CODES[policy.algorithm],
            policy.lam,
            policy.norm.code,
            policy.use_filter,
            policy.ttl,
        )
    else:
        raise ValueError(f"unknown backend {name!r}; use 'cython' or 'python'")
    return RoutingOutcome(_STATUS_BY_CODE[code], tuple(path), int(ops), destination)


_ALG_CODES = {Algorithm.GREEDY: _ref.ALG_GREEDY, Algorithm.INERTIA: _ref.ALG_INERTIA}


def predicted_scalar_ops(
    topology: Topology,
    policy: RoutingPolicy,
    outcome: RoutingOutcome,
    system: Optional[CoordinateSystem] = None,
) -> int:
    """Closed-form cost-model prediction for a finished route.

    Replays the outcome's path against the documented accounting rule
    (see kernels.reference) without re-running any step decision; route()
    must report exactly this number.
    """
    path = outcome.path
    destination = outcome.destination
    table = _prepare_space(topology, policy, path[0], destination, system)
    m = table.shape[1]
    if m == 0 or path[0] == destination:
        return 0
    dest_row = table[destination]
    ops = 0
    heading_present = False
    inertia = policy.algorithm is Algorithm.INERTIA
    n_steps = len(path) - 1
    failed_attempt = outcome.status in (
        RouteStatus.DROPPED_LOCAL_MINIMUM,
        RouteStatus.DROPPED_NO_NEIGHBOR,
    )
    attempts = n_steps + (1 if failed_attempt else 0)
    for i in range(attempts):
        node = path[i]
        cur = table[node]
        d = m
        sub_active = False
        if policy.use_filter:
            kept = _ref.filter_kept_indices(cur.tolist(), dest_row.tolist())
            if len(kept) < m:
                d = len(kept)
                sub_active = True
        k = len(topology.adjacency[node])
        if not inertia:
            ops += (k + 1) * d
        else:
            k_el = k - (1 if i > 0 else 0)
            ops += d  # destination-direction norm
            if heading_present and sub_active:
                ops += d  # heading re-projection norm
            ops += d  # blend norm
            ops += 2 * d * k_el
            moved = i < n_steps
            if moved:
                nxt = table[path[i + 1]]
                disp = float(np.sqrt(((nxt - cur) ** 2).sum()))
                if sub_active:
                    ops += m  # full-space heading update norm
                if disp > 0.0:
                    heading_present = True
    return ops


def path_csv_row(path: Sequence[int]) -> str:
    """Path trace as a single CSV row of node ids."""
    return ",".join(str(int(v)) for v in path)
