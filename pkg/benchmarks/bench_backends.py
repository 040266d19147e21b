#!/usr/bin/env python3
"""Benchmark the compiled routing kernel against the pure-Python fallback.

Routes the same seeded message workload through both backends, checks the
outcomes are bit-identical, and reports throughput.

Usage: python3 benchmarks/bench_backends.py [--nodes N] [--pairs P]
"""

import argparse
import random
import time

import anchorspace as asp
from anchorspace.kernels import available_backends


def build_workload(nodes: int, pairs: int):
    topo = asp.generate_uniform(nodes, 1.0, 0.08 * (500 / nodes) ** 0.5, seed=7)
    topo = asp.place_random_anchors(topo, 8, seed=1)
    system = asp.build_system(topo, asp.DistanceMode.EXACT_EUCLIDEAN)
    rng = random.Random(3)
    endpoints = [(rng.randrange(nodes), rng.randrange(nodes)) for _ in range(pairs)]
    policies = [
        asp.RoutingPolicy(algorithm=asp.Algorithm.GREEDY, ttl=4 * nodes),
        asp.RoutingPolicy(algorithm=asp.Algorithm.GREEDY, use_filter=True, ttl=4 * nodes),
        asp.RoutingPolicy(algorithm=asp.Algorithm.INERTIA, lam=0.5, ttl=4 * nodes),
    ]
    return topo, system, endpoints, policies


def run(backend: str, workload) -> tuple[float, list]:
    topo, system, endpoints, policies = workload
    outcomes = []
    start = time.perf_counter()
    for policy in policies:
        for s, t in endpoints:
            outcomes.append(asp.route(topo, policy, s, t, system, backend=backend))
    return time.perf_counter() - start, outcomes


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=500)
    parser.add_argument("--pairs", type=int, default=2000)
    args = parser.parse_args()

    workload = build_workload(args.nodes, args.pairs)
    n_routes = len(workload[2]) * len(workload[3])
    print(f"workload: {args.nodes} nodes, {n_routes} routes, backends: {available_backends()}")

    results = {}
    for backend in available_backends():
        elapsed, outcomes = run(backend, workload)
        results[backend] = (elapsed, outcomes)
        print(f"  {backend:>7}: {elapsed:8.3f}s  ({n_routes / elapsed:10.0f} routes/s)")

    if "cython" in results:
        py_elapsed, py_out = results["python"]
        cy_elapsed, cy_out = results["cython"]
        identical = py_out == cy_out
        print(f"speedup: {py_elapsed / cy_elapsed:.1f}x, outcomes identical: {identical}")
        if not identical:
            raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
