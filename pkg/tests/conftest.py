import math

import pytest

from anchorspace.topology import Point2D, Topology, topology_from_points


@pytest.fixture
def path_graph() -> Topology:
    """Three collinear nodes spaced exactly one radius apart: 0-1-2."""
    pts = [Point2D(0.0, 0.0), Point2D(1.0, 0.0), Point2D(2.0, 0.0)]
    return topology_from_points(pts, side=2.0, comm_radius=1.0)


@pytest.fixture
def grid5() -> Topology:
    """5x5 axis-aligned grid with 4-neighbor connectivity."""
    pts = [Point2D(float(i), float(j)) for j in range(5) for i in range(5)]
    return topology_from_points(pts, side=4.0, comm_radius=1.0)


@pytest.fixture
def line4() -> Topology:
    """Four nodes on the x axis at integer spacing, consecutive adjacency."""
    pts = [Point2D(float(i), 0.0) for i in range(4)]
    return topology_from_points(pts, side=3.0, comm_radius=1.0)


def grid_index(i: int, j: int) -> int:
    return j * 5 + i


def euclid(a: Point2D, b: Point2D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)
