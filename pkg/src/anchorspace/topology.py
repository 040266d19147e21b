"""Immutable network topologies: node placement, unit-disk connectivity,
disk obstacles, and anchor placement.

All generation is deterministic: randomness comes from ``random.Random``
seeded per call, consuming only its ``random()`` method (the one stream
CPython guarantees stable across versions and platforms).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .errors import GenerationError

MAX_PLACEMENT_REJECTIONS = 10_000


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point components must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Obstacle:
    """Disk obstacle: blocks any node placement inside it and any edge
    whose segment passes within ``radius`` of ``center``."""

    center: Point2D
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError(f"obstacle radius must be > 0, got {self.radius}")

    def contains(self, p: Point2D) -> bool:
        return p.distance_to(self.center) <= self.radius

    def blocks_segment(self, a: Point2D, b: Point2D) -> bool:
        return _segment_point_distance(a, b, self.center) <= self.radius


@dataclass(frozen=True)
class PositionedAnchor:
    """An anchor at a concrete 2D point, optionally hosted by a node."""

    point: Point2D
    node_id: Optional[int] = None


@dataclass(frozen=True)
class DirectionalAnchor:
    """The limit of an anchor receding to infinity along ``direction``.

    Its distance function is affine: offset - (position . direction).
    The offset cancels in every coordinate difference; 0.0 keeps the
    components exactly representable.
    """

    direction: tuple[float, float]
    offset: float = 0.0

    def __post_init__(self):
        dx, dy = self.direction
        if abs(math.hypot(dx, dy) - 1.0) > 1e-9:
            raise ValueError(f"direction must be a unit vector, got {self.direction}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")


AnchorSpec = Union[PositionedAnchor, DirectionalAnchor]


@dataclass(frozen=True)
class Topology:
    """Immutable node set with unit-disk adjacency.

    ``nodes`` are indexed by dense integer ids starting at 0; ``adjacency``
    holds one ascending neighbor tuple per node. ``side`` is the deployment
    square's side length, kept so anchor placement can find the boundary.
    """

    nodes: tuple[Point2D, ...]
    side: float
    comm_radius: float
    adjacency: tuple[tuple[int, ...], ...]
    obstacles: tuple[Obstacle, ...] = ()
    anchors: tuple[AnchorSpec, ...] = ()

    def __post_init__(self):
        if len(self.adjacency) != len(self.nodes):
            raise ValueError("adjacency length must match node count")
        for a in self.anchors:
            if isinstance(a, PositionedAnchor) and a.node_id is not None:
                host = self.nodes[a.node_id]
                if host.x != a.point.x or host.y != a.point.y:
                    raise ValueError(
                        f"anchor node_id {a.node_id} is at {host}, not at {a.point}"
                    )

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @cached_property
    def positions(self) -> np.ndarray:
        """(n, 2) float64 array of node positions, read-only."""
        arr = np.array([(p.x, p.y) for p in self.nodes], dtype=np.float64)
        arr = arr.reshape(len(self.nodes), 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def csr_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form (indptr, indices) for the compiled kernel."""
        indptr = np.zeros(len(self.adjacency) + 1, dtype=np.intc)
        for i, nbrs in enumerate(self.adjacency):
            indptr[i + 1] = indptr[i] + len(nbrs)
        indices = np.fromiter(
            (v for nbrs in self.adjacency for v in nbrs), dtype=np.intc, count=int(indptr[-1])
        )
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return indptr, indices

    def neighbors(self, node: int) -> tuple[int, ...]:
        self.check_node(node)
        return self.adjacency[node]

    def check_node(self, node: int) -> None:
        if not isinstance(node, (int, np.integer)) or isinstance(node, bool):
            raise ValueError(f"node id must be an integer, got {node!r}")
        if not (0 <= node < len(self.nodes)):
            raise ValueError(f"node id {node} out of range [0, {len(self.nodes)})")


def _segment_point_distance(a: Point2D, b: Point2D, c: Point2D) -> float:
    """Minimum distance from point c to segment a-b."""
    abx, aby = b.x - a.x, b.y - a.y
    acx, acy = c.x - a.x, c.y - a.y
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.hypot(acx, acy)
    t = (acx * abx + acy * aby) / denom
    t = min(1.0, max(0.0, t))
    return math.hypot(a.x + t * abx - c.x, a.y + t * aby - c.y)


def _build_adjacency(
    nodes: Sequence[Point2D], comm_radius: float, obstacles: Sequence[Obstacle]
) -> tuple[tuple[int, ...], ...]:
    n = len(nodes)
    neighbor_lists: list[list[int]] = [[] for _ in range(n)]
    if n > 1:
        pts = np.array([(p.x, p.y) for p in nodes], dtype=np.float64)
        pairs = sorted(cKDTree(pts).query_pairs(comm_radius))
        for i, j in pairs:
            a, b = nodes[i], nodes[j]
            if any(o.blocks_segment(a, b) for o in obstacles):
                continue
            neighbor_lists[i].append(j)
            neighbor_lists[j].append(i)
    return tuple(tuple(sorted(lst)) for lst in neighbor_lists)


def generate_uniform(
    count: int,
    side: float,
    comm_radius: float,
    obstacles: Sequence[Obstacle] = (),
    seed: int = 0,
) -> Topology:
    """Generate ``count`` nodes uniformly in the square [0, side]^2.

    Positions falling inside an obstacle disk are resampled; two nodes are
    adjacent iff their distance is <= comm_radius and the straight segment
    between them stays clear of every obstacle disk. Pure function of its
    arguments, including the seed.

    Raises GenerationError when a single node placement is rejected
    MAX_PLACEMENT_REJECTIONS times in a row (obstacles cover too much of
    the square).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not (side > 0):
        raise ValueError(f"side must be > 0, got {side}")
    if not (comm_radius > 0):
        raise ValueError(f"comm_radius must be > 0, got {comm_radius}")
    obstacles = tuple(obstacles)

    rng = random.Random(seed)
    nodes: list[Point2D] = []
    for _ in range(count):
        rejections = 0
        while True:
            p = Point2D(rng.random() * side, rng.random() * side)
            if not any(o.contains(p) for o in obstacles):
                nodes.append(p)
                break
            rejections += 1
            if rejections >= MAX_PLACEMENT_REJECTIONS:
                raise GenerationError(
                    f"node placement rejected {rejections} times in a row; "
                    f"obstacles leave too little free area"
                )

    adjacency = _build_adjacency(nodes, comm_radius, obstacles)
    return Topology(
        nodes=tuple(nodes),
        side=side,
        comm_radius=comm_radius,
        adjacency=adjacency,
        obstacles=obstacles,
    )


def topology_from_points(
    points: Sequence[Point2D],
    side: float,
    comm_radius: float,
    obstacles: Sequence[Obstacle] = (),
) -> Topology:
    """Topology with explicit node positions; adjacency follows the same
    unit-disk-plus-obstacle rule as generate_uniform."""
    points = tuple(points)
    if not points:
        raise ValueError("points must be nonempty")
    obstacles = tuple(obstacles)
    for i, p in enumerate(points):
        if any(o.contains(p) for o in obstacles):
            raise ValueError(f"node {i} at {p} lies inside an obstacle")
    return Topology(
        nodes=points,
        side=side,
        comm_radius=comm_radius,
        adjacency=_build_adjacency(points, comm_radius, obstacles),
        obstacles=obstacles,
    )


def _perimeter_point(side: float, t: float) -> Point2D:
    """Point at arc length t along the square boundary, counterclockwise
    from (0, 0)."""
    if t < side:
        return Point2D(t, 0.0)
    if t < 2 * side:
        return Point2D(side, t - side)
    if t < 3 * side:
        return Point2D(side - (t - 2 * side), side)
    return Point2D(0.0, side - (t - 3 * side))


def place_boundary_anchors(topology: Topology, k: int) -> Topology:
    """Return a copy whose anchors are k beacons spaced at equal perimeter
    intervals along the deployment square boundary, counterclockwise from
    the corner (0, 0). Beacons carry no host node."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    step = 4.0 * topology.side / k
    anchors = tuple(PositionedAnchor(_perimeter_point(topology.side, i * step)) for i in range(k))
    return replace(topology, anchors=anchors)


def place_random_anchors(topology: Topology, k: int, seed: int = 0) -> Topology:
    """Return a copy whose anchors are k distinct nodes drawn uniformly
    without replacement (partial Fisher-Yates driven by Random.random())."""
    n = topology.node_count
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = random.Random(seed)
    pool = list(range(n))
    for i in range(k):
        j = i + int(rng.random() * (n - i))
        pool[i], pool[j] = pool[j], pool[i]
    anchors = tuple(
        PositionedAnchor(topology.nodes[node_id], node_id=node_id) for node_id in pool[:k]
    )
    return replace(topology, anchors=anchors)


def place_external_anchors(topology: Topology, points: Sequence[Point2D]) -> Topology:
    """Return a copy whose anchors are beacons at the given points, order
    preserved. Points may lie outside the deployment square."""
    if not points:
        raise ValueError("points must be nonempty")
    anchors = tuple(PositionedAnchor(p) for p in points)
    return replace(topology, anchors=anchors)


def shortest_path_hops(topology: Topology, source: int, target: int) -> Optional[int]:
    """Minimum hop count between two nodes by breadth-first search.

    Returns None when the target is unreachable. This is the oracle the
    stretch metric and the hop-coordinate tests are checked against.
    """
    topology.check_node(source)
    topology.check_node(target)
    if source == target:
        return 0
    adjacency = topology.adjacency
    seen = {source: 0}
    frontier = [source]
    level = 0
    while frontier:
        level += 1
        next_frontier = []
        for u in frontier:
            for v in adjacency[u]:
                if v not in seen:
                    if v == target:
                        return level
                    seen[v] = level
                    next_frontier.append(v)
        frontier = next_frontier
    return None
