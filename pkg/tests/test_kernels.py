"""Bit-exact parity between the compiled kernel and the pure-Python
reference: identical paths, statuses, and scalar-op counters on a
randomized workload covering every algorithm/space/filter/norm combo."""

import random
import subprocess
import sys

import pytest

from anchorspace import kernels
from anchorspace.coords import DistanceMode, Norm, build_system
from anchorspace.routing import Algorithm, RoutingPolicy, route
from anchorspace.topology import generate_uniform, place_random_anchors

needs_compiled = pytest.mark.skipif(
    kernels.fast is None, reason="compiled kernel not built"
)


@needs_compiled
def test_backends_bit_identical_on_randomized_workload():
    rng = random.Random(1234)
    policies = [
        RoutingPolicy(algorithm=Algorithm.GREEDY, ttl=400),
        RoutingPolicy(algorithm=Algorithm.GREEDY, norm=Norm.L1, ttl=400),
        RoutingPolicy(algorithm=Algorithm.GREEDY, norm=Norm.LINF, ttl=400),
        RoutingPolicy(algorithm=Algorithm.GREEDY, use_filter=True, ttl=400),
        RoutingPolicy(algorithm=Algorithm.GREEDY, subset=(0, 2, 4), ttl=400),
        RoutingPolicy(algorithm=Algorithm.GREEDY, use_filter=True, subset=(1, 2, 3), ttl=400),
        RoutingPolicy(algorithm=Algorithm.INERTIA, lam=0.0, ttl=400),
        RoutingPolicy(algorithm=Algorithm.INERTIA, lam=0.5, ttl=400),
        RoutingPolicy(algorithm=Algorithm.INERTIA, lam=1.0, ttl=400),
        RoutingPolicy(algorithm=Algorithm.INERTIA, lam=0.5, use_filter=True, ttl=400),
        RoutingPolicy(
            algorithm=Algorithm.INERTIA, lam=0.7, use_filter=True, subset=(0, 1, 4), ttl=400
        ),
    ]
    for seed in range(4):
        topo = generate_uniform(200, 1.0, 0.11, seed=seed)
        anchored = place_random_anchors(topo, 5, seed=seed + 50)
        for mode in DistanceMode:
            system = build_system(anchored, mode)
            for _ in range(12):
                s, t = rng.randrange(200), rng.randrange(200)
                for policy in policies:
                    fast = route(anchored, policy, s, t, system, backend="cython")
                    ref = route(anchored, policy, s, t, system, backend="python")
                    assert fast == ref, (seed, mode, policy.label, s, t)


@needs_compiled
def test_backends_identical_in_classical_space():
    from anchorspace.routing import Space

    rng = random.Random(5)
    topo = generate_uniform(300, 1.0, 0.1, seed=3)
    for policy in (
        RoutingPolicy(algorithm=Algorithm.GREEDY, space=Space.CLASSICAL_2D, ttl=400),
        RoutingPolicy(algorithm=Algorithm.INERTIA, lam=0.5, space=Space.CLASSICAL_2D, ttl=400),
    ):
        for _ in range(40):
            s, t = rng.randrange(300), rng.randrange(300)
            assert route(topo, policy, s, t, backend="cython") == route(
                topo, policy, s, t, backend="python"
            )


def test_backend_env_override_selects_python():
    code = (
        "import anchorspace; "
        "assert anchorspace.active_backend() == 'python', anchorspace.active_backend()"
    )
    subprocess.run(
        [sys.executable, "-c", code],
        check=True,
        env={"PATH": "/usr/bin:/bin", "ANCHORSPACE_BACKEND": "python"},
    )


def test_explicit_unknown_backend_rejected(path_graph):
    from anchorspace.routing import Space

    with pytest.raises(ValueError):
        route(path_graph, RoutingPolicy(space=Space.CLASSICAL_2D), 0, 2, backend="zig")
