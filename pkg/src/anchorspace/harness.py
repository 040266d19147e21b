"""Experiment driver: scenario grids over anchor counts, placements,
distance modes and algorithms, with metric aggregation and baseline
comparison against classical 2D routing.

Determinism contract: every run is a pure function of its config. Child
seeds derive from the config seeds via SHA-256 over "base:tag:index", so
adding or reordering policies never perturbs topology or pair sampling,
and replications draw independent streams.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Optional, Sequence

import numpy as np

from .coords import CoordinateSystem, DistanceMode, Norm, build_system, hop_sweep
from .errors import ConfigError
from .kernels import reference as _ref
from .routing import (
    Algorithm,
    RouteStatus,
    RoutingPolicy,
    Space,
    _prepare_space,
    route,
)
from .topology import (
    DirectionalAnchor,
    Obstacle,
    Point2D,
    Topology,
    generate_uniform,
    place_boundary_anchors,
    place_external_anchors,
    place_random_anchors,
    shortest_path_hops,
)

RESULTS_HEADER = (
    "scenario,policy,anchors,placement,mode,norm,delivery_rate,mean_hops,"
    "mean_stretch,scalar_ops,drop_local_min,drop_ttl,drop_no_neighbor"
)

TRACE_HEADER = "scenario,policy,replication,msg,source,destination,status,sp_hops,hops,path"


def derive_seed(base: int, tag: str, index: int) -> int:
    """Child seed: first 8 bytes (big-endian) of SHA-256("base:tag:index")."""
    digest = hashlib.sha256(f"{base}:{tag}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


class PlacementKind(Enum):
    BOUNDARY = "boundary"
    RANDOM = "random"
    EXTERNAL = "external"
    INFINITE_NE = "infinite_ne"


@dataclass(frozen=True)
class AnchorPlacement:
    """How a scenario positions its anchors.

    BOUNDARY: k beacons spaced evenly along the deployment square edge.
    RANDOM: k network nodes drawn without replacement (seeded).
    EXTERNAL: beacons at explicit points, e.g. along a flight path.
    INFINITE_NE: the two directional anchors north (0,1) and east (1,0),
    the limit setup equivalent to classical 2D coordinates.
    """

    kind: PlacementKind
    k: Optional[int] = None
    seed: Optional[int] = None
    points: Optional[tuple[Point2D, ...]] = None

    def __post_init__(self):
        if self.kind in (PlacementKind.BOUNDARY, PlacementKind.RANDOM):
            if self.k is None or not (2 <= self.k <= 64):
                raise ConfigError(f"anchors.k must be in [2, 64], got {self.k}")
            if self.kind is PlacementKind.RANDOM and self.seed is None:
                object.__setattr__(self, "seed", 0)
        elif self.kind is PlacementKind.EXTERNAL:
            if not self.points:
                raise ConfigError("anchors.points must be nonempty for external placement")
            object.__setattr__(self, "points", tuple(self.points))
        if self.kind is not PlacementKind.EXTERNAL and self.points is not None:
            raise ConfigError("anchors.points is only valid for external placement")

    @property
    def anchor_count(self) -> int:
        if self.kind is PlacementKind.INFINITE_NE:
            return 2
        if self.kind is PlacementKind.EXTERNAL:
            return len(self.points)
        return self.k


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment scenario; see README for the JSON schema."""

    placement: AnchorPlacement
    policies: tuple[RoutingPolicy, ...]
    name: str = "scenario"
    count: int = 500
    side: float = 1.0
    comm_radius: float = 0.08
    obstacles: tuple[Obstacle, ...] = ()
    topology_seed: int = 42
    mode: DistanceMode = DistanceMode.EXACT_EUCLIDEAN
    norm: Norm = Norm.L2
    pair_count: int = 100
    pair_seed: int = 1
    ttl: Optional[int] = None
    replications: int = 1
    keep_traces: bool = True

    def __post_init__(self):
        object.__setattr__(self, "policies", tuple(self.policies))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.policies:
            raise ConfigError("policies must be nonempty")
        if self.count < 1:
            raise ConfigError(f"topology.count must be >= 1, got {self.count}")
        if self.pair_count < 1:
            raise ConfigError(f"pairs.count must be >= 1, got {self.pair_count}")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if self.ttl is not None and self.ttl < 1:
            raise ConfigError(f"ttl must be >= 1, got {self.ttl}")
        if (
            self.placement.kind is PlacementKind.INFINITE_NE
            and self.mode is not DistanceMode.EXACT_EUCLIDEAN
        ):
            raise ConfigError(
                "anchors.placement=infinite_ne requires mode=exact "
                f"(got mode={self.mode.value}); hop counts to an anchor at "
                "infinity are undefined"
            )
        if self.placement.kind is PlacementKind.RANDOM and self.placement.k > self.count:
            raise ConfigError(
                f"anchors.k={self.placement.k} exceeds topology.count={self.count}"
            )
        n_anchors = self.placement.anchor_count
        for policy in self.policies:
            if policy.subset is not None:
                bad = [i for i in policy.subset if not (0 <= i < n_anchors)]
                if bad:
                    raise ConfigError(
                        f"policy {policy.label}: subset indices {bad} out of "
                        f"range for {n_anchors} anchors"
                    )


@dataclass(frozen=True)
class MessageTrace:
    replication: int
    source: int
    destination: int
    sp_hops: int
    status: RouteStatus
    path: tuple[int, ...]
    scalar_ops: int

    @property
    def hops(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True)
class PolicyMetrics:
    policy: RoutingPolicy
    attempted: int
    delivered: int
    delivery_rate: float
    mean_hops: float
    mean_stretch: float
    scalar_ops: int
    drop_local_minimum: int
    drop_ttl: int
    drop_no_neighbor: int
    traces: tuple[MessageTrace, ...] = ()


@dataclass(frozen=True)
class RunReport:
    config: ScenarioConfig
    ttls: tuple[int, ...]
    per_policy: tuple[PolicyMetrics, ...]


@dataclass(frozen=True)
class GridEntry:
    """run_grid result slot: a report, or the error that config raised."""

    config: ScenarioConfig
    report: Optional[RunReport] = None
    error: Optional[str] = None


def place_anchors(config: ScenarioConfig, topology: Topology, replication: int) -> Topology:
    placement = config.placement
    if placement.kind is PlacementKind.BOUNDARY:
        return place_boundary_anchors(topology, placement.k)
    if placement.kind is PlacementKind.RANDOM:
        seed = derive_seed(placement.seed, "anchors", replication)
        return place_random_anchors(topology, placement.k, seed)
    if placement.kind is PlacementKind.EXTERNAL:
        return place_external_anchors(topology, placement.points)
    anchors = (DirectionalAnchor((0.0, 1.0)), DirectionalAnchor((1.0, 0.0)))
    return replace(topology, anchors=anchors)


def replication_topology(config: ScenarioConfig, replication: int) -> Topology:
    """Topology for one replication, anchors placed."""
    topo = generate_uniform(
        config.count,
        config.side,
        config.comm_radius,
        config.obstacles,
        derive_seed(config.topology_seed, "topology", replication),
    )
    return place_anchors(config, topo, replication)


def diameter_hops_estimate(topology: Topology) -> int:
    """Double-sweep BFS lower bound on the hop diameter."""
    first = hop_sweep(topology, 0)
    finite = np.isfinite(first)
    if not finite.any() or topology.node_count == 1:
        return 0
    far = int(np.argmax(np.where(finite, first, -1.0)))
    second = hop_sweep(topology, far)
    finite2 = np.isfinite(second)
    return int(second[finite2].max()) if finite2.any() else 0


def effective_ttl(config: ScenarioConfig, topology: Topology) -> int:
    """Configured TTL, or 10x the estimated hop diameter."""
    if config.ttl is not None:
        return config.ttl
    est = diameter_hops_estimate(topology)
    if est <= 0:
        est = topology.node_count  # degenerate sweep; be generous
    return 10 * est


def sample_pairs(
    topology: Topology, count: int, seed: int
) -> list[tuple[int, int, int]]:
    """Uniform (source, destination, sp_hops) triples over connected
    ordered pairs, by rejection against the BFS oracle."""
    import random as _random

    n = topology.node_count
    if n < 2:
        raise ConfigError("pair sampling needs at least 2 nodes")
    rng = _random.Random(seed)
    pairs: list[tuple[int, int, int]] = []
    attempts = 0
    limit = 10_000 * count
    while len(pairs) < count:
        attempts += 1
        if attempts > limit:
            raise ConfigError(
                f"could not sample {count} connected pairs in {limit} attempts; "
                "topology too disconnected"
            )
        s = int(rng.random() * n)
        t = int(rng.random() * n)
        if s == t:
            continue
        hops = shortest_path_hops(topology, s, t)
        if hops is None:
            continue
        pairs.append((s, t, hops))
    return pairs


def run_scenario(config: ScenarioConfig) -> RunReport:
    """Execute one scenario: per replication, build the topology and
    coordinate system, sample message pairs, route each pair under every
    policy, and aggregate metrics. Deterministic in the config."""
    needs_system = any(p.space is Space.MULTI_DIM for p in config.policies)
    acc: dict[int, dict] = {
        i: {
            "delivered": 0,
            "hops_sum": 0.0,
            "stretch_sum": 0.0,
            "ops": 0,
            "drops": {s: 0 for s in RouteStatus},
            "traces": [],
        }
        for i in range(len(config.policies))
    }
    ttls = []
    for r in range(config.replications):
        topo = replication_topology(config, r)
        system = build_system(topo, config.mode, config.norm) if needs_system else None
        ttl = effective_ttl(config, topo)
        ttls.append(ttl)
        pairs = sample_pairs(topo, config.pair_count, derive_seed(config.pair_seed, "pairs", r))
        for i, policy in enumerate(config.policies):
            bound = replace(policy, ttl=ttl)
            slot = acc[i]
            for s, t, sp in pairs:
                out = route(
                    topo,
                    bound,
                    s,
                    t,
                    system if policy.space is Space.MULTI_DIM else None,
                )
                slot["ops"] += out.scalar_ops
                if out.delivered:
                    slot["delivered"] += 1
                    slot["hops_sum"] += out.hops
                    slot["stretch_sum"] += out.hops / sp
                else:
                    slot["drops"][out.status] += 1
                if config.keep_traces:
                    slot["traces"].append(
                        MessageTrace(r, s, t, sp, out.status, out.path, out.scalar_ops)
                    )

    attempted = config.replications * config.pair_count
    per_policy = []
    for i, policy in enumerate(config.policies):
        slot = acc[i]
        delivered = slot["delivered"]
        per_policy.append(
            PolicyMetrics(
                policy=policy,
                attempted=attempted,
                delivered=delivered,
                delivery_rate=delivered / attempted,
                mean_hops=slot["hops_sum"] / delivered if delivered else math.nan,
                mean_stretch=slot["stretch_sum"] / delivered if delivered else math.nan,
                scalar_ops=slot["ops"],
                drop_local_minimum=slot["drops"][RouteStatus.DROPPED_LOCAL_MINIMUM],
                drop_ttl=slot["drops"][RouteStatus.DROPPED_TTL],
                drop_no_neighbor=slot["drops"][RouteStatus.DROPPED_NO_NEIGHBOR],
                traces=tuple(slot["traces"]),
            )
        )
    return RunReport(config=config, ttls=tuple(ttls), per_policy=tuple(per_policy))


def _grid_entry(config: ScenarioConfig) -> GridEntry:
    try:
        return GridEntry(config=config, report=run_scenario(config))
    except Exception as exc:  # isolate per-config failures
        return GridEntry(config=config, error=f"{type(exc).__name__}: {exc}")


def run_grid(configs: Sequence[ScenarioConfig], workers: int = 1) -> list[GridEntry]:
    """Run every config independently; order-preserving, and failures do
    not abort the remaining configs. Results are identical for any
    ``workers`` value (runs share nothing but immutable inputs)."""
    configs = list(configs)
    if not configs:
        raise ValueError("config list must be nonempty")
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_grid_entry, configs))
    return [_grid_entry(c) for c in configs]


@dataclass(frozen=True)
class PolicyComparison:
    policy_a: str
    policy_b: str
    paths_equal: tuple[bool, ...]
    all_paths_equal: bool
    delivery_rate_delta: float
    mean_hops_delta: float
    mean_stretch_delta: float
    scalar_ops_delta: int


@dataclass(frozen=True)
class BaselineComparison:
    entries: tuple[PolicyComparison, ...]

    @property
    def all_paths_equal(self) -> bool:
        return all(e.all_paths_equal for e in self.entries)


_SHARED_FIELDS = (
    "count",
    "side",
    "comm_radius",
    "obstacles",
    "topology_seed",
    "pair_count",
    "pair_seed",
    "replications",
)


def _policy_key(policy: RoutingPolicy):
    lam = policy.lam if policy.algorithm is Algorithm.INERTIA else None
    return (policy.algorithm, lam, policy.norm)


def compare_baseline(report_a: RunReport, report_b: RunReport) -> BaselineComparison:
    """Message-by-message comparison of two reports over identical
    topologies and pairs; policies are matched modulo coordinate space.

    Used for the infinite-north/east sanity check, where every matched
    policy pair must produce identical paths, and for plain baseline
    deltas elsewhere (no equality requirement)."""
    for field_name in _SHARED_FIELDS:
        va, vb = getattr(report_a.config, field_name), getattr(report_b.config, field_name)
        if va != vb:
            raise ValueError(f"configs differ on {field_name}: {va!r} vs {vb!r}")
    entries = []
    for metrics_a in report_a.per_policy:
        key = _policy_key(metrics_a.policy)
        matches = [m for m in report_b.per_policy if _policy_key(m.policy) == key]
        for metrics_b in matches:
            if not metrics_a.traces or not metrics_b.traces:
                raise ValueError("compare_baseline needs traces; set keep_traces=True")
            if len(metrics_a.traces) != len(metrics_b.traces):
                raise ValueError("trace counts differ; configs not comparable")
            flags = tuple(
                ta.source == tb.source
                and ta.destination == tb.destination
                and ta.status is tb.status
                and ta.path == tb.path
                for ta, tb in zip(metrics_a.traces, metrics_b.traces)
            )
            entries.append(
                PolicyComparison(
                    policy_a=metrics_a.policy.label,
                    policy_b=metrics_b.policy.label,
                    paths_equal=flags,
                    all_paths_equal=all(flags),
                    delivery_rate_delta=metrics_b.delivery_rate - metrics_a.delivery_rate,
                    mean_hops_delta=metrics_b.mean_hops - metrics_a.mean_hops,
                    mean_stretch_delta=metrics_b.mean_stretch - metrics_a.mean_stretch,
                    scalar_ops_delta=metrics_b.scalar_ops - metrics_a.scalar_ops,
                )
            )
    if not entries:
        raise ValueError("no policies matched between the two reports")
    return BaselineComparison(entries=tuple(entries))


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def write_results_csv(reports: Sequence[RunReport], stream: IO[str]) -> None:
    """Aggregate results, one row per (config, policy); floats at 6
    significant digits for byte-stable regression outputs."""
    stream.write(RESULTS_HEADER + "\n")
    for report in reports:
        cfg = report.config
        for metrics in report.per_policy:
            row = (
                f"{cfg.name},{metrics.policy.label},{cfg.placement.anchor_count},"
                f"{cfg.placement.kind.value},{cfg.mode.value},{metrics.policy.norm.value},"
                f"{_fmt(metrics.delivery_rate)},{_fmt(metrics.mean_hops)},"
                f"{_fmt(metrics.mean_stretch)},{metrics.scalar_ops},"
                f"{metrics.drop_local_minimum},{metrics.drop_ttl},{metrics.drop_no_neighbor}"
            )
            stream.write(row + "\n")


def write_traces_csv(reports: Sequence[RunReport], stream: IO[str]) -> None:
    """Per-message traces; path cell is space-separated node ids."""
    stream.write(TRACE_HEADER + "\n")
    for report in reports:
        cfg = report.config
        for metrics in report.per_policy:
            for msg_index, trace in enumerate(metrics.traces):
                path_cell = " ".join(str(v) for v in trace.path)
                stream.write(
                    f"{cfg.name},{metrics.policy.label},{trace.replication},{msg_index},"
                    f"{trace.source},{trace.destination},{trace.status.name},"
                    f"{trace.sp_hops},{trace.hops},{path_cell}\n"
                )


def validate_trace(
    topology: Topology,
    policy: RoutingPolicy,
    trace: MessageTrace,
    ttl: int,
    system: Optional[CoordinateSystem] = None,
) -> None:
    """Universal trace validator: path validity for every algorithm, plus
    strict per-hop progress for GREEDY (measured in the same filtered
    subspace the step decision used). Raises ValueError on violation."""
    path = trace.path
    if not path or path[0] != trace.source:
        raise ValueError(f"path must start at the source, got {path[:1]}")
    if len(path) - 1 > ttl:
        raise ValueError(f"path uses {len(path) - 1} hops, ttl is {ttl}")
    if trace.status is RouteStatus.DELIVERED and path[-1] != trace.destination:
        raise ValueError("delivered path does not end at the destination")
    for a, b in zip(path, path[1:]):
        if b not in topology.adjacency[a]:
            raise ValueError(f"path edge {a}-{b} is not an adjacency edge")
    if policy.algorithm is not Algorithm.GREEDY or len(path) < 2:
        return
    table = _prepare_space(topology, policy, trace.source, trace.destination, system)
    rows = table.tolist()
    dest_row = rows[trace.destination]
    m = len(dest_row)
    norm_code = policy.norm.code
    for a, b in zip(path, path[1:]):
        cur, nxt = rows[a], rows[b]
        sub = None
        if policy.use_filter:
            kept = _ref.filter_kept_indices(cur, dest_row)
            if len(kept) < m:
                sub = kept
        if sub is None:
            d_cur = _ref.vec_distance(cur, dest_row, norm_code)
            d_nxt = _ref.vec_distance(nxt, dest_row, norm_code)
        else:
            d_cur = _ref._sub_distance(cur, dest_row, norm_code, sub)
            d_nxt = _ref._sub_distance(nxt, dest_row, norm_code, sub)
        if not d_nxt < d_cur:
            raise ValueError(
                f"greedy hop {a}->{b} does not strictly decrease the distance "
                f"({d_cur} -> {d_nxt})"
            )
