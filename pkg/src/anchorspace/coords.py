"""Multi-dimensional virtual coordinates: each node is addressed by its
vector of distances to the anchor set, in exact-Euclidean or hop-count
mode. Includes the per-hop anchor filter and coordinate-subset projection
used by the routing layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import IO, Sequence, Union

import numpy as np

from .errors import ModeError, UnreachableAnchorError
from .kernels import reference as _ref
from .topology import AnchorSpec, DirectionalAnchor, Point2D, PositionedAnchor, Topology

#: Sentinel for a hop count with no path to the anchor host.
UNREACHABLE = math.inf

#: A virtual coordinate is a 1-D float64 vector, one component per anchor.
VirtualCoordinate = np.ndarray

CoordLike = Union[Sequence[float], np.ndarray]


class DistanceMode(Enum):
    EXACT_EUCLIDEAN = "exact"
    HOP_COUNT = "hop"


class Norm(Enum):
    L2 = "l2"
    L1 = "l1"
    LINF = "linf"

    @property
    def code(self) -> int:
        return _NORM_CODES[self]


_NORM_CODES = {Norm.L2: _ref.NORM_L2, Norm.L1: _ref.NORM_L1, Norm.LINF: _ref.NORM_LINF}


def _as_vector(value: CoordLike, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D coordinate vector")
    return arr


def anchor_distance(position: Point2D, anchor: AnchorSpec) -> float:
    """Distance from a 2D position to one anchor.

    Positioned anchors use the Euclidean distance; a directional anchor at
    infinity contributes offset - (position . direction).
    """
    if isinstance(anchor, PositionedAnchor):
        dx = position.x - anchor.point.x
        dy = position.y - anchor.point.y
        return math.sqrt(dx * dx + dy * dy)
    ux, uy = anchor.direction
    return anchor.offset - (position.x * ux + position.y * uy)


def exact_coordinate(position: Point2D, anchors: Sequence[AnchorSpec]) -> VirtualCoordinate:
    """Exact-distance virtual coordinate of a 2D position."""
    if not anchors:
        raise ValueError("anchors must be nonempty")
    return np.array([anchor_distance(position, a) for a in anchors], dtype=np.float64)


def anchor_host_node(topology: Topology, anchor: AnchorSpec) -> int:
    """Node hosting an anchor in hop-count mode.

    A node-coincident anchor hosts itself; a pure beacon snaps to the
    nearest node, lowest id on distance ties. Directional anchors have no
    hop semantics.
    """
    if isinstance(anchor, DirectionalAnchor):
        raise ModeError("directional anchors have no hop-count host node")
    if anchor.node_id is not None:
        return anchor.node_id
    pos = topology.positions
    d2 = (pos[:, 0] - anchor.point.x) ** 2 + (pos[:, 1] - anchor.point.y) ** 2
    return int(np.argmin(d2))  # argmin returns the first (lowest-id) minimum


def hop_sweep(topology: Topology, start: int) -> np.ndarray:
    """Level-synchronous BFS from one node; UNREACHABLE where no path."""
    n = topology.node_count
    levels = np.full(n, UNREACHABLE, dtype=np.float64)
    levels[start] = 0.0
    frontier = [start]
    depth = 0.0
    adjacency = topology.adjacency
    while frontier:
        depth += 1.0
        nxt = []
        for u in frontier:
            for v in adjacency[u]:
                if levels[v] == UNREACHABLE:
                    levels[v] = depth
                    nxt.append(v)
        frontier = nxt
    return levels


def hop_coordinates(topology: Topology) -> np.ndarray:
    """Hop-count coordinate table, one BFS sweep per anchor.

    Returns an (n_nodes, n_anchors) float64 array; rows are indexed by
    node id, components follow anchor-list order. Hops are stored as reals
    so the routing code is mode-agnostic.
    """
    if not topology.anchors:
        raise ValueError("topology has no anchors")
    for a in topology.anchors:
        if isinstance(a, DirectionalAnchor):
            raise ModeError("hop-count mode requires every anchor to be positioned")
    columns = [hop_sweep(topology, anchor_host_node(topology, a)) for a in topology.anchors]
    return np.column_stack(columns)


def coord_distance(a: CoordLike, b: CoordLike, norm: Norm = Norm.L2) -> float:
    """Distance between two virtual coordinates under the selected norm.

    Components are accumulated in ascending index order with scalar
    arithmetic, matching the routing kernels bit for bit.
    """
    va = _as_vector(a, "a")
    vb = _as_vector(b, "b")
    if va.shape != vb.shape:
        raise ValueError(f"coordinate lengths differ: {va.size} vs {vb.size}")
    for vec in (va, vb):
        if np.isinf(vec).any():
            raise UnreachableAnchorError(
                "coordinate has an UNREACHABLE component; exclude that anchor "
                "before measuring distances"
            )
    return _ref.vec_distance(va.tolist(), vb.tolist(), norm.code)


def filter_anchors(sender: CoordLike, destination: CoordLike) -> list[int]:
    """Anchor indices kept for one routing step, ascending.

    Anchor i is ignored iff sender[i] < destination[i] and sender[i] is
    under half the sender's farthest-anchor distance (the anchor sits in
    the sender's way). If the rule would ignore every anchor, the full
    index set is returned instead: routing always keeps a coordinate space.
    """
    vs = _as_vector(sender, "sender")
    vd = _as_vector(destination, "destination")
    if vs.shape != vd.shape:
        raise ValueError(f"coordinate lengths differ: {vs.size} vs {vd.size}")
    if not (np.isfinite(vs).all() and np.isfinite(vd).all()):
        raise ValueError("filter_anchors requires finite components")
    kept = _ref.filter_kept_indices(vs.tolist(), vd.tolist())
    return list(kept)


def project_subset(coord: CoordLike, indices: Sequence[int]) -> VirtualCoordinate:
    """Select coordinate components by index, in the given order."""
    vec = _as_vector(coord, "coord")
    idx = list(indices)
    if not idx:
        raise ValueError("indices must be nonempty; routing needs >= 1 coordinate")
    if len(set(idx)) != len(idx):
        raise ValueError(f"indices must be distinct, got {idx}")
    for i in idx:
        if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
            raise ValueError(f"indices must be integers, got {i!r}")
        if not (0 <= i < vec.size):
            raise ValueError(f"index {i} out of range [0, {vec.size})")
    return vec[idx]


@dataclass(frozen=True)
class CoordinateSystem:
    """Per-node virtual coordinate table, immutable after construction."""

    anchors: tuple[AnchorSpec, ...]
    mode: DistanceMode
    table: np.ndarray
    norm: Norm = Norm.L2

    def __post_init__(self):
        self.table.setflags(write=False)

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)

    @property
    def node_count(self) -> int:
        return self.table.shape[0]

    def coord(self, node: int) -> VirtualCoordinate:
        return self.table[node]

    @cached_property
    def table_rows(self) -> list[list[float]]:
        """Table as plain Python floats, for the pure-Python kernel."""
        return self.table.tolist()


def build_system(
    topology: Topology, mode: DistanceMode, norm: Norm = Norm.L2
) -> CoordinateSystem:
    """Compute the full per-node coordinate table for a topology."""
    anchors = topology.anchors
    if not anchors:
        raise ValueError("topology has no anchors")
    if mode is DistanceMode.HOP_COUNT:
        table = hop_coordinates(topology)
    else:
        pos = topology.positions
        x, y = pos[:, 0], pos[:, 1]
        columns = []
        for a in anchors:
            if isinstance(a, PositionedAnchor):
                # same operation order as anchor_distance, so the table is
                # bit-identical to per-node exact_coordinate calls
                columns.append(np.sqrt((x - a.point.x) ** 2 + (y - a.point.y) ** 2))
            else:
                ux, uy = a.direction
                columns.append(a.offset - (x * ux + y * uy))
        table = np.column_stack(columns)
    return CoordinateSystem(anchors=tuple(anchors), mode=mode, table=table, norm=norm)


def write_coordinate_csv(system: CoordinateSystem, stream: IO[str]) -> None:
    """Dump the coordinate table as CSV.

    Header is ``node,anchor_0,...,anchor_{n-1}``; UNREACHABLE renders as
    the literal ``inf``.
    """
    header = ["node"] + [f"anchor_{i}" for i in range(system.n_anchors)]
    stream.write(",".join(header) + "\n")
    for node in range(system.node_count):
        row = system.table[node]
        cells = [str(node)] + [repr(float(v)) for v in row]
        stream.write(",".join(cells) + "\n")


def coordinate_table_csv(system: CoordinateSystem) -> str:
    import io

    buf = io.StringIO()
    write_coordinate_csv(system, buf)
    return buf.getvalue()
