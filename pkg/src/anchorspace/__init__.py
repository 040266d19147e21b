"""anchorspace: deterministic sensor-network routing simulator.

Nodes are addressed by their raw distance vector to a set of anchors and
messages are routed greedily in that multi-dimensional space; the package
reproduces the comparison protocol against classical 2D geographic
routing, including the two-anchors-at-infinity baseline that matches 2D
routing exactly.
"""

from .coords import (
    UNREACHABLE,
    CoordinateSystem,
    DistanceMode,
    Norm,
    build_system,
    coord_distance,
    coordinate_table_csv,
    exact_coordinate,
    filter_anchors,
    hop_coordinates,
    project_subset,
    write_coordinate_csv,
)
from .errors import (
    ConfigError,
    GenerationError,
    ModeError,
    SimulationError,
    UnreachableAnchorError,
)
from .harness import (
    AnchorPlacement,
    BaselineComparison,
    GridEntry,
    MessageTrace,
    PlacementKind,
    PolicyMetrics,
    RunReport,
    ScenarioConfig,
    compare_baseline,
    derive_seed,
    run_grid,
    run_scenario,
    validate_trace,
    write_results_csv,
    write_traces_csv,
)
from .kernels import active_backend, available_backends
from .routing import (
    Algorithm,
    RouteStatus,
    RoutingOutcome,
    RoutingPolicy,
    RoutingState,
    Space,
    greedy_step,
    inertia_step,
    path_csv_row,
    predicted_scalar_ops,
    route,
)
from .svg import render_route_svg
from .topology import (
    AnchorSpec,
    DirectionalAnchor,
    Obstacle,
    Point2D,
    PositionedAnchor,
    Topology,
    generate_uniform,
    place_boundary_anchors,
    place_external_anchors,
    place_random_anchors,
    shortest_path_hops,
    topology_from_points,
)

__version__ = "0.1.0"
