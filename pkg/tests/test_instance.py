"""Instance generation, validation, and serialization."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from bpmpbench.instance import (
    GenParams,
    Instance,
    InstanceError,
    from_json,
    generate,
    load,
    save,
    to_json,
    validate,
)


def test_n3_full_density_requests_forced():
    inst = generate(3, 0, GenParams(density=1.0))
    assert sorted(inst.requests()) == [(1, 2), (1, 3), (2, 3)]


def test_generation_is_pure_and_serialization_byte_identical():
    a = to_json(generate(6, 42))
    b = to_json(generate(6, 42))
    assert a == b
    assert generate(6, 42) == generate(6, 42)
    assert to_json(generate(6, 43)) != a


def test_shortest_path_within_distance_limit():
    inst = generate(8, 7)
    n = inst.n
    # independent all-pairs shortest path
    sp = [[inst.dist[i][j] for j in range(n)] for i in range(n)]
    for m in range(n):
        for i in range(n):
            for j in range(n):
                sp[i][j] = min(sp[i][j], sp[i][m] + sp[m][j])
    assert sp[0][n - 1] <= inst.max_distance


def test_save_load_round_trip(tmp_path):
    inst = generate(6, 42)
    path = tmp_path / "inst.json"
    save(inst, path)
    assert load(path) == inst


def test_nonzero_diagonal_rejected():
    inst = generate(4, 0)
    rows = [list(r) for r in inst.dist]
    rows[1][1] = 1.0
    bad = to_json(
        Instance(
            n=inst.n,
            dist=tuple(tuple(r) for r in rows),
            req_weight=inst.req_weight,
            capacity=inst.capacity,
            max_distance=inst.max_distance,
            price=inst.price,
            cost=inst.cost,
            vehicle_weight=inst.vehicle_weight,
        )
    )
    with pytest.raises(InstanceError, match="diagonal distance nonzero"):
        from_json(bad)


def test_request_into_origin_rejected():
    inst = generate(4, 0)
    rows = [list(r) for r in inst.req_weight]
    rows[2][0] = 1.0  # request 3 -> 1
    bad = Instance(
        n=inst.n,
        dist=inst.dist,
        req_weight=tuple(tuple(r) for r in rows),
        capacity=inst.capacity,
        max_distance=inst.max_distance,
        price=inst.price,
        cost=inst.cost,
        vehicle_weight=inst.vehicle_weight,
    )
    violations = validate(bad)
    assert any("request into origin" in v for v in violations)
    with pytest.raises(InstanceError):
        from_json(to_json(bad))


def test_validate_reports_named_rules():
    inst = generate(5, 3)
    assert validate(inst) == []

    zero_q = Instance(
        n=inst.n,
        dist=inst.dist,
        req_weight=inst.req_weight,
        capacity=0.0,
        max_distance=inst.max_distance,
        price=inst.price,
        cost=inst.cost,
        vehicle_weight=inst.vehicle_weight,
    )
    assert any("capacity must be positive" in v for v in validate(zero_q))

    rows = [list(r) for r in inst.req_weight]
    k, l = next(iter(inst.requests()))
    rows[k - 1][l - 1] = inst.capacity + 1.0
    too_big = Instance(
        n=inst.n,
        dist=inst.dist,
        req_weight=tuple(tuple(r) for r in rows),
        capacity=inst.capacity,
        max_distance=inst.max_distance,
        price=inst.price,
        cost=inst.cost,
        vehicle_weight=inst.vehicle_weight,
    )
    assert any("request exceeds capacity" in v for v in validate(too_big))


def test_malformed_file_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 3,,}')
    with pytest.raises(InstanceError, match="line"):
        load(path)
    with pytest.raises(InstanceError, match="missing fields"):
        from_json("{}")


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(n=2, seed=0), "n must be >= 3"),
        (dict(n=5, seed=0, params=GenParams(density=0.0)), "density"),
        (dict(n=5, seed=0, params=GenParams(density=1.5)), "density"),
        (dict(n=5, seed=0, params=GenParams(slack_factor=1.0)), "slack_factor"),
        (dict(n=5, seed=0, params=GenParams(capacity=-1)), "capacity"),
    ],
)
def test_generate_rejects_bad_arguments(kwargs, message):
    with pytest.raises(ValueError, match=message):
        generate(**kwargs)


def test_triangle_inequality_up_to_rounding():
    # distances are Euclidean rounded to 2 decimals: slack <= 3 * 0.005
    for seed in range(10):
        inst = generate(7, seed)
        n = inst.n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert inst.dist[i][k] <= inst.dist[i][j] + inst.dist[j][k] + 0.015 + 1e-12


@settings(max_examples=100, deadline=None)
@given(n=st.integers(min_value=3, max_value=50), seed=st.integers(min_value=0, max_value=10**6))
def test_generated_instances_always_validate(n, seed):
    inst = generate(n, seed)
    assert validate(inst) == []
    assert inst.max_distance >= inst.dist[0][n - 1]


def test_request_weights_within_range():
    inst = generate(10, 11)
    q = inst.capacity
    for k, l in inst.requests():
        assert 0.1 * q - 1e-9 <= inst.w(k, l) <= q + 1e-9
