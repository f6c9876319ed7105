"""Shared fixtures: instance suites and cached solver results.

The equivalence suite (criteria 3-6) reuses MIP objectives across tests;
results are cached per (n, seed, formulation, technique list) so each
model is solved exactly once per session.
"""

from __future__ import annotations

import pytest

from bpmpbench.formulations import TechniqueSet, build
from bpmpbench.instance import GenParams, Instance, generate
from bpmpbench.oracle import solve_exact
from bpmpbench.solver import solve_mip

SUITE_SIZES = (4, 5, 6)
SUITE_SEEDS = tuple(range(20))


@pytest.fixture(scope="session")
def suite_instance():
    cache: dict[tuple[int, int], Instance] = {}

    def get(n: int, seed: int) -> Instance:
        key = (n, seed)
        if key not in cache:
            cache[key] = generate(n, seed)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def oracle_objective(suite_instance):
    cache: dict[tuple[int, int], float] = {}

    def get(n: int, seed: int) -> float:
        key = (n, seed)
        if key not in cache:
            cache[key] = solve_exact(suite_instance(n, seed)).objective
        return cache[key]

    return get


@pytest.fixture(scope="session")
def mip_objective(suite_instance):
    cache: dict[tuple, float] = {}

    def get(n: int, seed: int, formulation: str, ts: TechniqueSet) -> float:
        key = (n, seed, formulation, ts.to_list())
        if key not in cache:
            model = build(suite_instance(n, seed), formulation, ts)
            sol = solve_mip(model)
            assert sol.status == "optimal", (key, sol.status)
            cache[key] = sol.objective
        return cache[key]

    return get


def tiny_instance(n: int = 4, seed: int = 1, **overrides) -> Instance:
    params = GenParams(**overrides) if overrides else None
    return generate(n, seed, params)


def zero_request_instance(n: int = 4) -> Instance:
    """Hand-built instance with no requests (route cost only)."""
    base = generate(n, 0)
    empty = tuple(tuple(0.0 for _ in range(n)) for _ in range(n))
    return Instance(
        n=n,
        dist=base.dist,
        req_weight=empty,
        capacity=base.capacity,
        max_distance=base.max_distance,
        price=base.price,
        cost=base.cost,
        vehicle_weight=base.vehicle_weight,
    )
