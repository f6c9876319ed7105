"""LP and branch-and-bound engine behavior."""

import math

import numpy as np
import pytest

from bpmpbench.formulations import TechniqueSet, build_node_arc, build_triples
from bpmpbench.instance import generate
from bpmpbench.model import Constraint, MipModel, Variable, emit_lp, parse_lp
from bpmpbench.oracle import solve_exact
from bpmpbench.solver import solve_lp, solve_mip
from bpmpbench.solver._standard_form import SENSE_EQ, SENSE_GE, SENSE_LE, standard_form


def test_lp_single_variable():
    m = MipModel(name="one")
    m.add_variable(Variable(name="th_0", lower=0.0, upper=2.0, objective_coeff=1.0))
    m.add_constraint(Constraint("cap", [("th_0", 1.0)], "<=", 1.0))
    sol = solve_lp(m)
    assert sol.status == "optimal"
    assert abs(sol.objective - 1.0) < 1e-9
    assert abs(sol.values["th_0"] - 1.0) < 1e-9


def test_lp_detects_infeasible_and_unbounded():
    m = MipModel(name="inf")
    m.add_variable(Variable(name="th_0", lower=0.0, upper=1.0))
    m.add_constraint(Constraint("a", [("th_0", 1.0)], ">=", 2.0))
    assert solve_lp(m).status == "infeasible"

    m2 = MipModel(name="unb")
    m2.add_variable(Variable(name="th_0", lower=0.0, upper=math.inf, objective_coeff=1.0))
    assert solve_lp(m2).status == "unbounded"


def test_lp_relaxation_bounds_mip():
    for seed in (0, 5):
        inst = generate(5, seed)
        model = build_node_arc(inst, TechniqueSet())
        lp = solve_lp(model)
        mip = solve_mip(model)
        assert lp.objective >= mip.objective - 1e-9


def scipy_lp_optimum(model):
    from scipy.optimize import linprog

    sf = standard_form(model)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i in range(sf.m):
        if sf.senses[i] == SENSE_LE:
            A_ub.append(sf.A[i])
            b_ub.append(sf.b[i])
        elif sf.senses[i] == SENSE_GE:
            A_ub.append(-sf.A[i])
            b_ub.append(-sf.b[i])
        else:
            A_eq.append(sf.A[i])
            b_eq.append(sf.b[i])
    bounds = [
        (sf.lb[j], None if np.isinf(sf.ub[j]) else sf.ub[j]) for j in range(sf.nv)
    ]
    res = linprog(
        -sf.obj,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    assert res.status == 0
    return -res.fun


def test_lp_matches_independent_solver_through_emission():
    inst = generate(5, 3)
    model = build_node_arc(inst, TechniqueSet())
    # cross-check travels through the emitted LP file and an external LP code
    reread = parse_lp(emit_lp(model))
    ours = solve_lp(model)
    independent = scipy_lp_optimum(reread)
    assert abs(ours.objective - independent) < 1e-6


def test_integral_relaxation_solves_in_one_node():
    m = MipModel(name="integral")
    m.add_variable(Variable(name="x_1_2", kind="binary", upper=1.0, objective_coeff=1.0))
    m.add_constraint(Constraint("one", [("x_1_2", 1.0)], "<=", 1.0))
    sol = solve_mip(m)
    assert sol.status == "optimal" and sol.nodes == 1
    assert abs(sol.objective - 1.0) < 1e-9
    assert sol.ticks == sol.pivots + 100 * sol.nodes


def test_mip_matches_oracle():
    inst = generate(5, 8)
    exact = solve_exact(inst).objective
    sol = solve_mip(build_node_arc(inst, TechniqueSet()))
    assert abs(sol.objective - exact) < 1e-6


def test_repeated_solve_is_bit_identical():
    inst = generate(5, 4)
    model = build_node_arc(inst, TechniqueSet(t1_conditional_arc_flow=True))
    a = solve_mip(model)
    b = solve_mip(model)
    assert (a.objective, a.nodes, a.pivots, a.ticks) == (b.objective, b.nodes, b.pivots, b.ticks)
    assert a.values == b.values


def test_mip_solution_invariants():
    inst = generate(5, 12)
    model = build_node_arc(inst, TechniqueSet())
    sol = solve_mip(model)
    for v in model.variables:
        if v.kind == "binary":
            val = sol.values[v.name]
            assert min(abs(val), abs(val - 1.0)) <= 1e-6
    recomputed = 0.0
    for v in model.variables:
        recomputed += v.objective_coeff * sol.values[v.name]
    assert abs(recomputed - sol.objective) < 1e-6


def test_priority_branches_route_variables_first():
    for seed in range(6):
        inst = generate(5, seed)
        model = build_node_arc(inst, TechniqueSet(t5_branch_priority=True))
        sol = solve_mip(model)
        if sol.root_branch_var is not None:
            assert sol.root_branch_var.startswith("x_")


def test_node_bounds_never_exceed_parent():
    inst = generate(5, 6)
    model = build_node_arc(inst, TechniqueSet())
    sol = solve_mip(model, collect_tree=True)
    for node_id, parent_bound, bound in sol.tree:
        assert bound <= parent_bound + 1e-9


def test_node_limit_reports_incumbent_and_bound():
    inst = generate(6, 1)
    model = build_node_arc(inst, TechniqueSet())
    sol = solve_mip(model, node_limit=5)
    assert sol.status == "node_limit"
    assert sol.best_bound is not None
    full = solve_mip(model)
    assert sol.best_bound >= full.objective - 1e-9
    if sol.objective is not None:
        assert sol.objective <= full.objective + 1e-9


def test_backend_override_validation():
    import bpmpbench.solver as S

    with pytest.raises(ValueError, match="unknown backend"):
        S._kernel("fortran")
