"""Exhaustive oracle behavior and guards."""

import itertools
import random

import pytest

from bpmpbench.formulations import TechniqueSet, build_node_arc
from bpmpbench.instance import GenParams, Instance, generate
from bpmpbench.oracle import (
    SizeGuardError,
    best_request_set,
    enumerate_routes,
    iter_feasible_solutions,
    objective_of,
    route_distance,
    solve_exact,
)
from bpmpbench.solver import solve_mip

from conftest import zero_request_instance


def small_instance(dist, req, q=2.0, d_max=7.0, p=2.0, c=1.0, v=1.0):
    n = len(dist)
    return Instance(
        n=n,
        dist=tuple(tuple(float(x) for x in row) for row in dist),
        req_weight=tuple(tuple(float(x) for x in row) for row in req),
        capacity=q,
        max_distance=d_max,
        price=p,
        cost=c,
        vehicle_weight=v,
    )


def test_route_enumeration_three_nodes():
    dist = [[0, 1, 1.5], [1, 0, 1], [1.5, 1, 0]]
    req = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    wide = small_instance(dist, req, d_max=100.0)
    assert enumerate_routes(wide) == [(1, 2, 3), (1, 3)]
    tight = small_instance(dist, req, d_max=1.7)  # d13 fits, d12 + d23 = 2 does not
    assert enumerate_routes(tight) == [(1, 3)]


def test_route_count_matches_permutation_filter():
    inst = generate(6, 42)
    routes = set(enumerate_routes(inst))
    brute = set()
    middles = [x for x in range(2, inst.n)]
    for r in range(len(middles) + 1):
        for mid in itertools.permutations(middles, r):
            route = (1,) + mid + (inst.n,)
            if route_distance(inst, route) <= inst.max_distance:
                brute.add(route)
    assert routes == brute


def test_best_request_set_empty_requests():
    inst = zero_request_instance(4)
    route = enumerate_routes(inst)[0]
    accepted, obj = best_request_set(inst, route)
    assert accepted == ()
    assert abs(obj - (-inst.cost * inst.vehicle_weight * route_distance(inst, route))) < 1e-12


def test_single_spanning_request_accept_iff_profitable():
    dist = [[0, 3, 4], [1, 0, 3], [4, 3, 0]]
    req_on = [[0, 0, 2.0], [0, 0, 0], [0, 0, 0]]  # request 1 -> 3, full capacity

    # profitable: revenue p*d13*w = 2*4*2 = 16 > carry c*w*route(1..3)
    inst = small_instance(dist, req_on, d_max=100.0)
    route = (1, 3)
    accepted, obj = best_request_set(inst, route)
    revenue = inst.price * inst.d(1, 3) * 2.0
    carry = inst.cost * 2.0 * inst.d(1, 3)
    base = -inst.cost * inst.vehicle_weight * inst.d(1, 3)
    assert revenue > carry
    assert accepted == ((1, 3),)
    assert abs(obj - (base + revenue - carry)) < 1e-12

    # unprofitable: price so low the request loses money
    cheap = small_instance(dist, req_on, d_max=100.0, p=0.1)
    accepted, obj = best_request_set(cheap, route)
    assert accepted == ()


def test_two_overlapping_heavy_requests_exclude_each_other():
    dist = [[0, 2, 3, 5], [2, 0, 2, 4], [3, 2, 0, 2], [5, 4, 2, 0]]
    req = [[0] * 4 for _ in range(4)]
    req[0][3] = 1.2  # 0.6 Q
    req[1][3] = 1.2
    inst = small_instance(dist, req, q=2.0, d_max=100.0)
    route = (1, 2, 3, 4)
    accepted, _ = best_request_set(inst, route)
    assert len(accepted) <= 1


def test_solve_exact_zero_requests():
    inst = zero_request_instance(5)
    sol = solve_exact(inst)
    best = min(route_distance(inst, r) for r in enumerate_routes(inst))
    assert abs(sol.objective - (-inst.cost * inst.vehicle_weight * best)) < 1e-9
    assert sol.accepted == ()


def test_solve_exact_matches_mip():
    inst = generate(5, 13)
    exact = solve_exact(inst)
    mip = solve_mip(build_node_arc(inst, TechniqueSet()))
    assert abs(exact.objective - mip.objective) < 1e-6


def test_exact_solution_internally_consistent():
    inst = generate(6, 17)
    sol = solve_exact(inst)
    # recompute the objective from the arc loads (flow form)
    total = 0.0
    for t in range(len(sol.route) - 1):
        i, j = sol.route[t], sol.route[t + 1]
        d = inst.d(i, j)
        total -= inst.cost * d * sol.arc_loads[(i, j)]
        total -= inst.cost * inst.vehicle_weight * d
    for k, l in sol.accepted:
        total += inst.price * inst.d(k, l) * inst.w(k, l)
    assert abs(total - sol.objective) < 1e-9
    assert len(set(sol.route)) == len(sol.route)
    assert route_distance(inst, sol.route) <= inst.max_distance + 1e-9
    for load in sol.arc_loads.values():
        assert load <= inst.capacity + 1e-9
    assert abs(objective_of(inst, sol.route, sol.accepted) - sol.objective) < 1e-9


def test_size_guards():
    inst = generate(11, 0)
    with pytest.raises(SizeGuardError, match="n <= 10"):
        enumerate_routes(inst)
    with pytest.raises(SizeGuardError, match="n <= 10"):
        solve_exact(inst)


def test_figure_style_instance_feasibility():
    # patterned on the worked example: 6 nodes, Q = 2, v = 1, D = 7
    dist = [
        [0, 2, 2, 3, 3, 6],
        [2, 0, 2, 2, 3, 5],
        [2, 2, 0, 3, 2, 4],
        [3, 2, 3, 0, 2, 3],
        [3, 3, 2, 2, 0, 2],
        [6, 5, 4, 3, 2, 0],
    ]
    req = [
        [0, 0.9, 0, 0.8, 0, 1.1],
        [0, 0, 0.6, 0, 1.0, 0],
        [0, 0, 0, 0, 1.2, 0.5],
        [0, 0.4, 0, 0, 0, 0.9],
        [0, 0, 0, 0, 0, 1.3],
        [0, 0, 0, 0, 0, 0],
    ]
    inst = small_instance(dist, req, q=2.0, d_max=7.0, p=2.0, c=1.0, v=1.0)
    sol = solve_exact(inst)
    assert len(sol.route) <= 4 + 2
    assert route_distance(inst, sol.route) <= 7.0
    for load in sol.arc_loads.values():
        assert load <= 2.0 + 1e-9


def test_oracle_dominates_random_feasible_samples():
    inst = generate(6, 23)
    sol = solve_exact(inst)
    routes = enumerate_routes(inst)
    rng = random.Random(0)
    for _ in range(1000):
        route = routes[rng.randrange(len(routes))]
        pos = {node: t for t, node in enumerate(route)}
        on_route = [(k, l) for k, l in inst.requests() if k in pos and l in pos and pos[k] < pos[l]]
        pick = [r for r in on_route if rng.random() < 0.4]
        loads = [0.0] * (len(route) - 1)
        feasible = True
        for k, l in pick:
            for t in range(pos[k], pos[l]):
                loads[t] += inst.w(k, l)
                if loads[t] > inst.capacity + 1e-9:
                    feasible = False
        if feasible:
            assert objective_of(inst, route, pick) <= sol.objective + 1e-9


def test_adding_a_request_never_decreases_objective():
    base = generate(5, 31, GenParams(density=0.4))
    before = solve_exact(base).objective
    rows = [list(r) for r in base.req_weight]
    added = False
    for k in range(1, base.n):
        for l in range(2, base.n + 1):
            if k != l and rows[k - 1][l - 1] == 0.0 and not added:
                rows[k - 1][l - 1] = 1.0
                added = True
    assert added
    richer = Instance(
        n=base.n,
        dist=base.dist,
        req_weight=tuple(tuple(r) for r in rows),
        capacity=base.capacity,
        max_distance=base.max_distance,
        price=base.price,
        cost=base.cost,
        vehicle_weight=base.vehicle_weight,
    )
    after = solve_exact(richer).objective
    assert after >= before - 1e-9


def test_feasible_solution_enumeration_contains_optimum():
    inst = generate(5, 2)
    sol = solve_exact(inst)
    found = False
    for route, accepted in iter_feasible_solutions(inst):
        if route == sol.route and tuple(sorted(accepted)) == tuple(sorted(sol.accepted)):
            found = True
            break
    assert found
