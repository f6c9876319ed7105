"""Builders and technique transformations."""

import pytest

from bpmpbench.formulations import (
    NODE_ARC,
    TRIPLES,
    TechniqueSet,
    apply_preset,
    build_node_arc,
    build_triples,
    single_node_demand_rows,
    triple_set,
)
from bpmpbench.instance import GenParams, generate
from bpmpbench.oracle import enumerate_routes, iter_feasible_solutions, route_distance, solve_exact
from bpmpbench.solver import solve_lp, solve_mip

from conftest import zero_request_instance


def row_names(model):
    return [c.name for c in model.constraints]


def test_conditional_arc_flow_replaces_static_capacity():
    inst = generate(5, 2)
    plain = build_node_arc(inst, TechniqueSet())
    names = row_names(plain)
    assert any(n.startswith("cap_") for n in names)
    assert not any(n.startswith("condcap_") for n in names)

    cond = build_node_arc(inst, TechniqueSet(t1_conditional_arc_flow=True))
    names = row_names(cond)
    assert not any(n.startswith("cap_") for n in names)
    cond_rows = [c for c in cond.constraints if c.name.startswith("condcap_")]
    arcs = [(i, j) for i in range(1, 5) for j in range(2, 6) if i != j]
    assert len(cond_rows) == len(arcs)
    for row in cond_rows:
        terms = dict(row.terms)
        th = [v for v in terms if v.startswith("th_")][0]
        x = [v for v in terms if v.startswith("x_")][0]
        assert terms[th] == 1.0 and terms[x] == -inst.capacity and row.sense == "<=" and row.rhs == 0.0


def test_relax_node_degree_drops_rows_but_keeps_optimum():
    inst = generate(5, 4)
    with_deg = build_node_arc(inst, TechniqueSet())
    without = build_node_arc(inst, TechniqueSet(t2_relax_node_degree=True))
    assert any(n.startswith("degree_") for n in row_names(with_deg))
    assert not any(n.startswith("degree_") for n in row_names(without))
    a = solve_mip(with_deg)
    b = solve_mip(without)
    assert abs(a.objective - b.objective) < 1e-6


def test_zero_request_instance_optimum_is_cheapest_route():
    inst = zero_request_instance(4)
    # brute force over simple 1 -> 4 paths
    best = min(route_distance(inst, r) for r in enumerate_routes(inst))
    expected = -inst.cost * inst.vehicle_weight * best
    for model in (build_node_arc(inst, TechniqueSet()), build_triples(inst, TechniqueSet())):
        sol = solve_mip(model)
        assert abs(sol.objective - expected) < 1e-6


def test_formulations_agree_with_oracle_on_random_instance():
    inst = generate(5, 9)
    exact = solve_exact(inst).objective
    for model in (build_node_arc(inst, TechniqueSet()), build_triples(inst, TechniqueSet())):
        sol = solve_mip(model)
        assert abs(sol.objective - exact) < 1e-6


def test_relax_triples_linking_drops_exactly_the_link_rows():
    inst = generate(5, 6)
    linked = build_triples(inst, TechniqueSet())
    relaxed = build_triples(inst, TechniqueSet(t10_relax_triples_linking=True))
    n_triples = len(triple_set(inst.n))
    assert len(linked.constraints) - len(relaxed.constraints) == n_triples
    assert not any(n.startswith("linkux_") for n in row_names(relaxed))
    a = solve_mip(linked)
    b = solve_mip(relaxed)
    assert abs(a.objective - b.objective) < 1e-6


def test_single_node_demand_rows_shape():
    inst = generate(6, 3, GenParams(density=1.0))
    rows = single_node_demand_rows(inst)
    # full density: origins 1..5 and destinations 2..6 each get one row
    assert len(rows) == 10
    assert sum(1 for r in rows if r.name.startswith("demout_")) == 5
    assert sum(1 for r in rows if r.name.startswith("demin_")) == 5
    for r in rows:
        assert r.sense == "<=" and r.rhs == inst.capacity


def test_single_request_demand_rows():
    base = generate(4, 0)
    rows_w = [[0.0] * 4 for _ in range(4)]
    rows_w[0][2] = 2.5  # single request 1 -> 3
    from bpmpbench.instance import Instance

    inst = Instance(
        n=4,
        dist=base.dist,
        req_weight=tuple(tuple(r) for r in rows_w),
        capacity=base.capacity,
        max_distance=base.max_distance,
        price=base.price,
        cost=base.cost,
        vehicle_weight=base.vehicle_weight,
    )
    rows = single_node_demand_rows(inst)
    assert len(rows) == 2
    for r in rows:
        assert r.terms == [("y_1_3", 2.5)] and r.rhs == inst.capacity


def test_demand_rows_hold_for_every_feasible_solution():
    inst = generate(5, 7)
    rows = single_node_demand_rows(inst)
    for _, accepted in iter_feasible_solutions(inst):
        y = set(accepted)
        for row in rows:
            total = sum(coeff for var, coeff in row.terms
                        if tuple(int(p) for p in var.split("_")[1:]) in y)
            assert total <= row.rhs + 1e-9


def test_presets():
    form, ts = apply_preset("best_node_arc")
    assert form == NODE_ARC
    assert ts.active_flags() == ("t1", "t2", "t4", "t5")
    form, ts = apply_preset("best_triples")
    assert form == TRIPLES
    assert ts.active_flags() == ("t10", "t11")
    form, ts = apply_preset("original_node_arc")
    assert ts.active_flags() == ()
    form, ts = apply_preset("original_triples")
    assert ts.active_flags() == ()
    with pytest.raises(ValueError, match="unknown preset"):
        apply_preset("fastest")


def test_technique_validity_rules():
    with pytest.raises(ValueError, match="t4 requires t1"):
        TechniqueSet(t4_relax_xz_linking=True).check(NODE_ARC)
    with pytest.raises(ValueError, match="t10"):
        TechniqueSet(t10_relax_triples_linking=True).check(NODE_ARC)
    with pytest.raises(ValueError, match="t5"):
        TechniqueSet(t5_branch_priority=True).check(TRIPLES)
    with pytest.raises(ValueError, match="big_m_value"):
        TechniqueSet(big_m_value=0).check(NODE_ARC)
    TechniqueSet.from_list("t1,t2,t4,t5").check(NODE_ARC)
    assert TechniqueSet.from_list("t1,t2").to_list() == "t1,t2"


def test_mtz_variants_and_bounds():
    inst = generate(5, 5)
    n = inst.n
    plain = build_node_arc(inst, TechniqueSet())
    assert sum(1 for c in plain.constraints if c.name.startswith("mtz_")) == len(
        [(i, j) for i in range(1, n) for j in range(2, n + 1) if i != j]
    )

    lifted = build_node_arc(inst, TechniqueSet(t6_lifted_mtz=True))
    lifted_rows = [c for c in lifted.constraints if c.name.startswith("mtzl_")]
    boundary_rows = [c for c in lifted.constraints if c.name.startswith("mtz_")]
    interior = [(i, j) for i in range(2, n) for j in range(2, n) if i != j]
    assert len(lifted_rows) == len(interior)
    # boundary arcs (from 1 or into n) keep the original subtour rows
    assert all(c.name.split("_")[1] == "1" or c.name.split("_")[2] == str(n) for c in boundary_rows)
    for c in lifted_rows:
        terms = dict(c.terms)
        assert c.rhs == float(n - 2)
        xs = sorted(v for v in terms if v.startswith("x_"))
        assert terms[xs[0]] in (float(n - 1), float(n - 3))

    bounded = build_node_arc(inst, TechniqueSet(t7_mtz_upper_bound=True))
    s_vars = {v.name: v for v in bounded.variables if v.name.startswith("s_")}
    assert s_vars["s_1"].lower == 0.0 and s_vars["s_1"].upper == float("inf")
    for i in range(2, n + 1):
        assert s_vars[f"s_{i}"].lower == 1.0
        assert s_vars[f"s_{i}"].upper == float(n - 1)


def test_branch_priority_flag_marks_route_binaries():
    inst = generate(4, 4)
    model = build_node_arc(inst, TechniqueSet(t5_branch_priority=True))
    for v in model.variables:
        if v.name.startswith("x_"):
            assert v.branch_priority == 10
        else:
            assert v.branch_priority == 0


def test_lifted_mtz_tightens_lp_relaxation():
    for seed in (0, 3, 8):
        inst = generate(5, seed)
        base = solve_lp(build_node_arc(inst, TechniqueSet()))
        lifted = solve_lp(build_node_arc(inst, TechniqueSet(t6_lifted_mtz=True)))
        assert lifted.objective <= base.objective + 1e-9


def test_optimal_route_is_simple_path_within_limits():
    inst = generate(5, 11)
    model = build_node_arc(inst, TechniqueSet())
    sol = solve_mip(model)
    arcs = [
        tuple(int(p) for p in name.split("_")[1:])
        for name, v in sol.values.items()
        if name.startswith("x_") and v > 0.5
    ]
    nxt = dict(arcs)
    assert len(nxt) == len(arcs)
    node, seen, dist = 1, {1}, 0.0
    while node != inst.n:
        after = nxt[node]
        assert after not in seen
        dist += inst.d(node, after)
        seen.add(after)
        node = after
    assert len(arcs) == len(seen) - 1  # no arcs off the path
    assert dist <= inst.max_distance + 1e-9
    for name, v in sol.values.items():
        if name.startswith("th_"):
            assert v <= inst.capacity + 1e-6
