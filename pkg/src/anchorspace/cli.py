"""Batch command-line front end.

Subcommands:
    run <config>                 execute a single scenario
    grid <config>                execute every scenario a config expands to
    trace <config> --pair S T    route one message pair, write SVG traces
    coords <config>              dump per-node coordinate tables as CSV

Flags: --out DIR (default $ANCHORSPACE_OUT or ./out), --seed U64 (master
seed override), --svg (render per-message traces for run/grid).

Configs are JSON; see README for the schema. Inside the "anchors" block,
"placement" and "k" may be lists, as may the top-level "mode"; the
document then expands to the cartesian grid of scenarios.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import harness
from .coords import DistanceMode, Norm, build_system, write_coordinate_csv
from .errors import ConfigError, SimulationError
from .harness import (
    AnchorPlacement,
    PlacementKind,
    RunReport,
    ScenarioConfig,
    derive_seed,
    effective_ttl,
    replication_topology,
    run_grid,
    run_scenario,
)
from .routing import Algorithm, RoutingPolicy, Space, route
from .svg import render_route_svg
from .topology import Obstacle, Point2D

_TOP_KEYS = {
    "name",
    "topology",
    "anchors",
    "mode",
    "norm",
    "policies",
    "pairs",
    "ttl",
    "replications",
    "keep_traces",
}
_TOPOLOGY_KEYS = {"count", "side", "comm_radius", "seed", "obstacles"}
_ANCHOR_KEYS = {"placement", "k", "seed", "points"}
_POLICY_KEYS = {"algorithm", "lambda", "space", "norm", "filter", "subset", "ttl"}
_PAIR_KEYS = {"count", "seed"}


def _reject_unknown(mapping: dict, allowed: set, prefix: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key: {prefix}{key}")


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def _parse_point(value, where: str) -> Point2D:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ConfigError(f"{where} must be a [x, y] pair, got {value!r}")
    return Point2D(float(value[0]), float(value[1]))


def _parse_obstacle(value, where: str) -> Obstacle:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(value, {"center", "radius"}, where + ".")
    if "center" not in value or "radius" not in value:
        raise ConfigError(f"{where} needs center and radius")
    return Obstacle(_parse_point(value["center"], where + ".center"), float(value["radius"]))


def _parse_policy(value, default_norm: Norm, where: str) -> RoutingPolicy:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(value, _POLICY_KEYS, where + ".")
    try:
        algorithm = Algorithm(value.get("algorithm", "greedy"))
    except ValueError:
        raise ConfigError(f"{where}.algorithm must be greedy or inertia")
    try:
        space = Space(value.get("space", "md"))
    except ValueError:
        raise ConfigError(f"{where}.space must be 2d or md")
    norm = default_norm
    if "norm" in value:
        try:
            norm = Norm(value["norm"])
        except ValueError:
            raise ConfigError(f"{where}.norm must be l2, l1 or linf")
    subset = value.get("subset")
    kwargs = dict(
        algorithm=algorithm,
        lam=float(value.get("lambda", 0.5)),
        space=space,
        norm=norm,
        use_filter=bool(value.get("filter", False)),
        subset=tuple(subset) if subset is not None else None,
    )
    if "ttl" in value and value["ttl"] is not None:
        kwargs["ttl"] = int(value["ttl"])
    try:
        return RoutingPolicy(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}")


def _build_placement(kind_name, k, seed, points, where: str) -> AnchorPlacement:
    try:
        kind = PlacementKind(kind_name)
    except ValueError:
        raise ConfigError(
            f"{where}.placement must be boundary, random, external or infinite_ne, "
            f"got {kind_name!r}"
        )
    if kind in (PlacementKind.BOUNDARY, PlacementKind.RANDOM):
        if k is None:
            raise ConfigError(f"{where}.k is required for {kind.value} placement")
        return AnchorPlacement(
            kind=kind,
            k=int(k),
            seed=int(seed) if (kind is PlacementKind.RANDOM and seed is not None) else None,
        )
    if kind is PlacementKind.EXTERNAL:
        if not points:
            raise ConfigError(f"{where}.points is required for external placement")
        pts = tuple(_parse_point(p, f"{where}.points[{i}]") for i, p in enumerate(points))
        return AnchorPlacement(kind=kind, points=pts)
    return AnchorPlacement(kind=kind)


def parse_config(text: str) -> list[ScenarioConfig]:
    """Parse a JSON scenario document into one or more configs.

    Unknown keys are rejected with their full path; list-valued
    anchors.placement / anchors.k / mode expand to a cartesian grid in
    document order (placement outermost, then mode, then k).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "")

    topo = doc.get("topology", {})
    if not isinstance(topo, dict):
        raise ConfigError("topology must be an object")
    _reject_unknown(topo, _TOPOLOGY_KEYS, "topology.")
    obstacles = tuple(
        _parse_obstacle(o, f"topology.obstacles[{i}]")
        for i, o in enumerate(topo.get("obstacles", []))
    )

    anchors = doc.get("anchors", {"placement": "boundary", "k": 4})
    if not isinstance(anchors, dict):
        raise ConfigError("anchors must be an object")
    _reject_unknown(anchors, _ANCHOR_KEYS, "anchors.")

    try:
        norm = Norm(doc.get("norm", "l2"))
    except ValueError:
        raise ConfigError("norm must be l2, l1 or linf")

    policy_docs = doc.get("policies", [{}])
    if not isinstance(policy_docs, list) or not policy_docs:
        raise ConfigError("policies must be a nonempty list")
    policies = tuple(
        _parse_policy(p, norm, f"policies[{i}]") for i, p in enumerate(policy_docs)
    )

    pairs = doc.get("pairs", {})
    if not isinstance(pairs, dict):
        raise ConfigError("pairs must be an object")
    _reject_unknown(pairs, _PAIR_KEYS, "pairs.")

    placements = _as_list(anchors.get("placement", "boundary"))
    modes = _as_list(doc.get("mode", "exact"))
    ks = _as_list(anchors.get("k")) if anchors.get("k") is not None else [None]
    expanded = len(placements) * len(modes) * len(ks) > 1

    base_name = str(doc.get("name", "scenario"))
    configs = []
    for placement_name in placements:
        for mode_name in modes:
            try:
                mode = DistanceMode(mode_name)
            except ValueError:
                raise ConfigError(f"mode must be exact or hop, got {mode_name!r}")
            for k in ks:
                placement = _build_placement(
                    placement_name, k, anchors.get("seed"), anchors.get("points"), "anchors"
                )
                name = base_name
                if expanded:
                    name = f"{base_name}-{placement.kind.value}-{mode.value}"
                    if placement.kind in (PlacementKind.BOUNDARY, PlacementKind.RANDOM):
                        name += f"-k{placement.k}"
                kwargs = dict(
                    placement=placement,
                    policies=policies,
                    name=name,
                    count=int(topo.get("count", 500)),
                    side=float(topo.get("side", 1.0)),
                    comm_radius=float(topo.get("comm_radius", 0.08)),
                    obstacles=obstacles,
                    topology_seed=int(topo.get("seed", 42)),
                    mode=mode,
                    norm=norm,
                    pair_count=int(pairs.get("count", 100)),
                    pair_seed=int(pairs.get("seed", 1)),
                    replications=int(doc.get("replications", 1)),
                    keep_traces=bool(doc.get("keep_traces", True)),
                )
                if doc.get("ttl") is not None:
                    kwargs["ttl"] = int(doc["ttl"])
                configs.append(ScenarioConfig(**kwargs))
    return configs


def parse_config_file(path: str | Path) -> list[ScenarioConfig]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return parse_config(text)


def canonical_config_dict(config: ScenarioConfig) -> dict:
    """Fully-explicit JSON form; parse_config() round-trips it."""
    anchors: dict = {"placement": config.placement.kind.value}
    if config.placement.k is not None:
        anchors["k"] = config.placement.k
    if config.placement.seed is not None:
        anchors["seed"] = config.placement.seed
    if config.placement.points is not None:
        anchors["points"] = [[p.x, p.y] for p in config.placement.points]
    policies = []
    for p in config.policies:
        entry = {
            "algorithm": p.algorithm.value,
            "lambda": p.lam,
            "space": p.space.value,
            "norm": p.norm.value,
            "filter": p.use_filter,
        }
        if p.subset is not None:
            entry["subset"] = list(p.subset)
        policies.append(entry)
    return {
        "name": config.name,
        "topology": {
            "count": config.count,
            "side": config.side,
            "comm_radius": config.comm_radius,
            "seed": config.topology_seed,
            "obstacles": [
                {"center": [o.center.x, o.center.y], "radius": o.radius}
                for o in config.obstacles
            ],
        },
        "anchors": anchors,
        "mode": config.mode.value,
        "norm": config.norm.value,
        "policies": policies,
        "pairs": {"count": config.pair_count, "seed": config.pair_seed},
        "ttl": config.ttl,
        "replications": config.replications,
        "keep_traces": config.keep_traces,
    }


def config_to_json(config: ScenarioConfig) -> str:
    return json.dumps(canonical_config_dict(config), indent=2) + "\n"


def override_master_seed(config: ScenarioConfig, master: int) -> ScenarioConfig:
    """Re-derive every stochastic seed in the config from one master seed."""
    placement = config.placement
    if placement.kind is PlacementKind.RANDOM:
        placement = replace(
            placement, seed=derive_seed(master, f"{config.name}:anchors", 0)
        )
    return replace(
        config,
        placement=placement,
        topology_seed=derive_seed(master, f"{config.name}:topology", 0),
        pair_seed=derive_seed(master, f"{config.name}:pairs", 0),
    )


def emit_outputs(
    reports: Sequence[RunReport], output_dir: str | Path, trace_flag: bool = False
) -> list[Path]:
    """Write results.csv (and, with trace_flag, traces.csv plus one SVG
    per traced message). Returns the list of files written."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    results = out / "results.csv"
    with results.open("w", encoding="utf-8", newline="\n") as fh:
        harness.write_results_csv(reports, fh)
    written.append(results)
    if trace_flag:
        traces = out / "traces.csv"
        with traces.open("w", encoding="utf-8", newline="\n") as fh:
            harness.write_traces_csv(reports, fh)
        written.append(traces)
        for report in reports:
            topologies = {}
            for metrics in report.per_policy:
                for msg_index, trace in enumerate(metrics.traces):
                    topo = topologies.get(trace.replication)
                    if topo is None:
                        topo = replication_topology(report.config, trace.replication)
                        topologies[trace.replication] = topo
                    svg_path = out / (
                        f"trace_{report.config.name}_{metrics.policy.label}"
                        f"_r{trace.replication}_m{msg_index}.svg"
                    )
                    title = (
                        f"{report.config.name} {metrics.policy.label} "
                        f"{trace.source}->{trace.destination} {trace.status.name}"
                    )
                    svg_path.write_text(
                        render_route_svg(
                            topo, trace.path, destination=trace.destination, title=title
                        ),
                        encoding="utf-8",
                    )
                    written.append(svg_path)
    return written


def _output_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get("ANCHORSPACE_OUT")
    return Path(env) if env else Path("out")


def _load_configs(args) -> list[ScenarioConfig]:
    configs = parse_config_file(args.config)
    if args.seed is not None:
        configs = [override_master_seed(c, args.seed) for c in configs]
    return configs


def _cmd_run(args) -> int:
    configs = _load_configs(args)
    if len(configs) != 1:
        print(
            f"error: config expands to {len(configs)} scenarios; use the grid subcommand",
            file=sys.stderr,
        )
        return 1
    report = run_scenario(configs[0])
    for path in emit_outputs([report], _output_dir(args), args.svg):
        print(path)
    return 0


def _cmd_grid(args) -> int:
    configs = _load_configs(args)
    entries = run_grid(configs)
    reports = [e.report for e in entries if e.report is not None]
    for path in emit_outputs(reports, _output_dir(args), args.svg):
        print(path)
    failed = [e for e in entries if e.error is not None]
    for entry in failed:
        print(f"error: scenario {entry.config.name}: {entry.error}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_trace(args) -> int:
    configs = _load_configs(args)
    if len(configs) != 1:
        print("error: trace needs a single-scenario config", file=sys.stderr)
        return 1
    config = configs[0]
    source, target = args.pair
    topo = replication_topology(config, 0)
    topo.check_node(source)
    topo.check_node(target)
    needs_system = any(p.space is Space.MULTI_DIM for p in config.policies)
    system = build_system(topo, config.mode, config.norm) if needs_system else None
    ttl = effective_ttl(config, topo)
    out = _output_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    for policy in config.policies:
        bound = replace(policy, ttl=ttl)
        outcome = route(
            topo, bound, source, target, system if policy.space is Space.MULTI_DIM else None
        )
        svg_path = out / f"trace_{config.name}_{policy.label}_{source}_{target}.svg"
        title = f"{config.name} {policy.label} {source}->{target} {outcome.status.name}"
        svg_path.write_text(
            render_route_svg(topo, outcome.path, destination=target, title=title),
            encoding="utf-8",
        )
        print(
            f"{policy.label}: {outcome.status.name} hops={outcome.hops} "
            f"scalar_ops={outcome.scalar_ops} -> {svg_path}"
        )
    return 0


def _cmd_coords(args) -> int:
    configs = _load_configs(args)
    out = _output_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    for config in configs:
        topo = replication_topology(config, 0)
        system = build_system(topo, config.mode, config.norm)
        csv_path = out / f"coords_{config.name}.csv"
        with csv_path.open("w", encoding="utf-8", newline="\n") as fh:
            write_coordinate_csv(system, fh)
        print(csv_path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchorspace",
        description="Deterministic virtual-coordinate routing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON scenario config")
        p.add_argument("--out", help="output directory (default $ANCHORSPACE_OUT or ./out)")
        p.add_argument("--seed", type=int, help="master seed override")

    p_run = sub.add_parser("run", help="run a single scenario")
    common(p_run)
    p_run.add_argument("--svg", action="store_true", help="write per-message SVG traces")
    p_run.set_defaults(func=_cmd_run)

    p_grid = sub.add_parser("grid", help="run every scenario the config expands to")
    common(p_grid)
    p_grid.add_argument("--svg", action="store_true", help="write per-message SVG traces")
    p_grid.set_defaults(func=_cmd_grid)

    p_trace = sub.add_parser("trace", help="route one pair and render SVG traces")
    common(p_trace)
    p_trace.add_argument(
        "--pair", nargs=2, type=int, metavar=("S", "T"), required=True,
        help="source and destination node ids",
    )
    p_trace.set_defaults(func=_cmd_trace)

    p_coords = sub.add_parser("coords", help="dump per-node coordinate tables")
    common(p_coords)
    p_coords.set_defaults(func=_cmd_coords)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
