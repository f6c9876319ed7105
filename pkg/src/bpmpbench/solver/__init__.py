"""Deterministic LP/MIP engine with cutting-plane support.

A bounded-variable primal simplex (with Bland anti-cycling) and a
best-bound branch-and-bound drive all solves.  The hot iteration loop has
two interchangeable implementations selected at import: a compiled Cython
kernel and a numpy fallback that produce bit-identical pivot sequences.
Work is reported as ticks = pivots + 100 * nodes, which is invariant
across runs, platforms, and backends for byte-equal models.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..instance import Instance
from ..model import Constraint, MipModel
from ._standard_form import (
    FEAS_TOL,
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    StandardForm,
    UNBOUNDED,
    solve_lp_arrays,
    standard_form,
)
from . import _simplex_py

try:  # compiled kernel is optional; the fallback is exact, just slower
    from . import _simplex_cy

    _HAVE_CY = True
except ImportError:  # pragma: no cover - build-environment dependent
    _simplex_cy = None
    _HAVE_CY = False

INT_TOL = 1e-6  # integrality tolerance on binaries
PRUNE_TOL = 1e-9  # bound-vs-incumbent pruning slack
TICKS_PER_NODE = 100

_STATUS_TEXT = {OPTIMAL: "optimal", INFEASIBLE: "infeasible", UNBOUNDED: "unbounded"}


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _HAVE_CY else ("python",)


def default_backend() -> str:
    env = os.environ.get("BPMPBENCH_BACKEND")
    if env:
        if env not in available_backends():
            raise ValueError(f"BPMPBENCH_BACKEND={env!r} is not available (have {available_backends()})")
        return env
    return "cython" if _HAVE_CY else "python"


def _kernel(backend: str | None):
    name = backend or default_backend()
    if name == "cython":
        if not _HAVE_CY:
            raise ValueError("compiled backend requested but not built")
        return _simplex_cy.simplex_kernel
    if name == "python":
        return _simplex_py.simplex_kernel
    raise ValueError(f"unknown backend {name!r}")


class SolverError(RuntimeError):
    """Internal solver failure (iteration limit, inconsistent state)."""


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    objective: float | None
    values: dict[str, float]
    pivots: int


@dataclass
class MipSolution:
    status: str  # optimal | infeasible | node_limit
    objective: float | None
    values: dict[str, float]
    nodes: int
    pivots: int
    ticks: int
    best_bound: float | None = None
    root_branch_var: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "objective": self.objective,
            "values": {k: v for k, v in self.values.items() if abs(v) > 1e-9},
            "nodes": self.nodes,
            "pivots": self.pivots,
            "ticks": self.ticks,
        }


@dataclass
class Cut:
    constraint: Constraint
    family: str  # cover | pairwise_demand
    generation_round: int


@dataclass
class CutLog:
    cuts: list[Cut] = field(default_factory=list)
    rounds: int = 0
    lp_pivots: int = 0
    round_limit_hit: bool = False


def _lp_once(sf: StandardForm, lb, ub, kernel, max_iter=200_000):
    status, x, objective, bound, pivots = solve_lp_arrays(sf, lb, ub, kernel, max_iter)
    if status == ITERATION_LIMIT:
        raise SolverError("simplex iteration limit exceeded")
    return status, x, objective, bound, pivots


def solve_lp(model: MipModel, backend: str | None = None) -> LpSolution:
    """Solve the LP relaxation (integrality dropped, bounds kept)."""
    sf = standard_form(model)
    kernel = _kernel(backend)
    status, x, objective, _, pivots = _lp_once(sf, sf.lb.copy(), sf.ub.copy(), kernel)
    if status != OPTIMAL:
        return LpSolution(_STATUS_TEXT[status], None, {}, pivots)
    return LpSolution("optimal", objective, dict(zip(sf.names, x.tolist())), pivots)


def _pick_branch_var(sf: StandardForm, x: np.ndarray) -> int:
    """Most important fractional binary: priority desc, fractionality desc,
    canonical variable order asc.  Returns -1 when integral."""
    best = -1
    best_key = None
    for j in range(sf.nv):
        if not sf.is_binary[j]:
            continue
        frac = abs(x[j] - round(x[j]))
        if frac <= INT_TOL:
            continue
        key = (-sf.priority[j], -frac, j)
        if best < 0 or key < best_key:
            best = j
            best_key = key
    return best


def solve_mip(
    model: MipModel,
    node_limit: int | None = None,
    backend: str | None = None,
    collect_tree: bool = False,
) -> MipSolution:
    """Exact maximization by branch and bound with depth-first dives.

    Child LPs are solved when nodes are created.  After branching, the
    search dives into the child with the better bound; when a dive ends,
    the open-node queue pops the largest bound first, breaking ties
    toward the newest node.  With equal model bytes the full
    (objective, nodes, pivots, ticks) tuple is reproducible across
    runs, platforms, and backends.
    """
    sf = standard_form(model)
    kernel = _kernel(backend)

    nodes = 0
    pivots = 0
    incumbent_obj = -math.inf
    incumbent_x = None
    root_branch_var: str | None = None
    tree: list[tuple[int, float, float]] = []  # (node id, parent bound, bound)

    def lp(lb, ub):
        nonlocal nodes, pivots
        status, x, objective, bound, p = _lp_once(sf, lb, ub, kernel)
        nodes += 1
        pivots += p
        return status, x, objective, bound

    def ticks() -> int:
        return pivots + TICKS_PER_NODE * nodes

    status, x, root_obj, root_bound, = lp(sf.lb.copy(), sf.ub.copy())
    if status == INFEASIBLE:
        return MipSolution("infeasible", None, {}, nodes, pivots, ticks())
    if status == UNBOUNDED:
        raise SolverError("LP relaxation unbounded; model is not a valid instance model")
    if collect_tree:
        tree.append((0, root_bound, root_bound))

    heap: list = []
    next_id = 1

    j0 = _pick_branch_var(sf, x)
    if j0 < 0:
        incumbent_obj, incumbent_x = root_obj, x
    else:
        root_branch_var = sf.names[j0]
        heap = [(-root_bound, 0, 0, j0, x, root_bound, sf.lb.copy(), sf.ub.copy())]

    limit_hit = False
    open_bound_at_break = -math.inf
    while heap:
        neg_bound, _, node_id, j, x, node_bound, lb, ub = heapq.heappop(heap)
        if node_bound <= incumbent_obj + PRUNE_TOL:
            continue
        if node_limit is not None and nodes >= node_limit:
            limit_hit = True
            open_bound_at_break = -neg_bound
            break
        # dive: branch, keep the better child in hand, queue the other
        while True:
            open_children = []
            for fix_to in (0.0, 1.0):
                clb, cub = lb.copy(), ub.copy()
                if fix_to == 0.0:
                    cub[j] = 0.0
                else:
                    clb[j] = 1.0
                cstatus, cx, cobj, cbound = lp(clb, cub)
                child_id = next_id
                next_id += 1
                if cstatus != OPTIMAL:
                    continue
                # a child subtree can never beat its parent's bound
                cbound = min(cbound, node_bound)
                if collect_tree:
                    tree.append((child_id, node_bound, cbound))
                if cbound <= incumbent_obj + PRUNE_TOL:
                    continue
                cj = _pick_branch_var(sf, cx)
                if cj < 0:
                    if cobj > incumbent_obj + PRUNE_TOL:
                        incumbent_obj = cobj
                        incumbent_x = cx
                    continue
                open_children.append((cbound, child_id, cj, cx, clb, cub))
            if not open_children:
                break
            open_children.sort(key=lambda c: (c[0], c[1]))
            cbound, child_id, j, x, lb, ub = open_children[-1]
            node_bound = cbound
            if len(open_children) == 2:
                ocbound, oid, oj, ox, olb, oub = open_children[0]
                heapq.heappush(heap, (-ocbound, -oid, oid, oj, ox, ocbound, olb, oub))
            if node_bound <= incumbent_obj + PRUNE_TOL:
                break
            if node_limit is not None and nodes >= node_limit:
                heapq.heappush(heap, (-node_bound, -child_id, child_id, j, x, node_bound, lb, ub))
                break

    if incumbent_x is None:
        if limit_hit:
            return MipSolution("node_limit", None, {}, nodes, pivots, ticks(), best_bound=open_bound_at_break)
        return MipSolution("infeasible", None, {}, nodes, pivots, ticks())

    values = dict(zip(sf.names, incumbent_x.tolist()))
    status_text = "node_limit" if limit_hit else "optimal"
    best_bound = max(incumbent_obj, open_bound_at_break) if limit_hit else incumbent_obj
    sol = MipSolution(
        status_text,
        incumbent_obj,
        values,
        nodes,
        pivots,
        ticks(),
        best_bound=best_bound,
        root_branch_var=root_branch_var,
    )
    if collect_tree:
        sol.tree = tree  # type: ignore[attr-defined]
    return sol


def separate_cover_cuts(
    inst: Instance, x_values: dict[tuple[int, int], float], tolerance: float = 1e-6
) -> list[Cut]:
    """Cover-cut separation over arc sets whose total length exceeds D.

    Solves min sum (1 - x*) z  s.t.  sum d z >= D + eps by dynamic
    programming on 2-decimal-scaled distances and returns the most
    violated cover when its cost is below 1 - tolerance.
    """
    arcs = sorted(x_values)
    weights = [int(round(100 * inst.d(i, j))) for i, j in arcs]
    costs = [max(0.0, 1.0 - min(1.0, max(0.0, x_values[a]))) for a in arcs]
    target = int(round(100 * inst.max_distance)) + 1

    n_items = len(arcs)
    if n_items == 0:
        return []
    INF_COST = math.inf
    tables = []
    dp = np.full(target + 1, INF_COST)
    dp[0] = 0.0
    tables.append(dp.copy())
    for idx in range(n_items):
        wt, cost = weights[idx], costs[idx]
        prev = dp.copy()
        if wt >= target:
            lead = prev.min() + cost
            if lead < dp[target]:
                dp[target] = lead
        else:
            np.minimum(dp[wt:], prev[: target + 1 - wt] + cost, out=dp[wt:])
            tail = prev[target - wt + 1 :].min() + cost if target - wt + 1 <= target else INF_COST
            if tail < dp[target]:
                dp[target] = tail
        tables.append(dp.copy())

    if not (tables[n_items][target] < 1.0 - tolerance):
        return []

    # walk the tables back to recover the chosen arc set
    chosen: list[tuple[int, int]] = []
    w = target
    for idx in range(n_items - 1, -1, -1):
        cur, prev = tables[idx + 1], tables[idx]
        if cur[w] == prev[w]:
            continue
        wt, cost = weights[idx], costs[idx]
        chosen.append(arcs[idx])
        if w < target:
            w -= wt
        else:
            lo = max(0, target - wt)
            for wp in range(lo, target + 1):
                if prev[wp] + cost == cur[target]:
                    w = wp
                    break
            else:  # pragma: no cover - defensive
                raise SolverError("cover-cut reconstruction failed")

    chosen.sort()
    terms = [(f"x_{i}_{j}", 1.0) for i, j in chosen]
    name = "covercut_" + "_".join(f"{i}.{j}" for i, j in chosen)
    cut = Constraint(name, terms, "<=", float(len(chosen) - 1))
    return [Cut(cut, "cover", 0)]


def separate_pairwise_demand(
    inst: Instance, y_values: dict[tuple[int, int], float], tolerance: float = 1e-6
) -> list[Cut]:
    """All violated pairwise-demand cuts: same-origin request pairs whose
    combined weight exceeds capacity are mutually exclusive."""
    cuts: list[Cut] = []
    by_origin: dict[int, list[tuple[int, int]]] = {}
    for k, l in sorted(y_values):
        by_origin.setdefault(k, []).append((k, l))
    for k in sorted(by_origin):
        reqs = by_origin[k]
        for a in range(len(reqs)):
            for b in range(a + 1, len(reqs)):
                (k1, i), (k2, j) = reqs[a], reqs[b]
                if inst.w(k1, i) + inst.w(k2, j) > inst.capacity:
                    if y_values[(k1, i)] + y_values[(k2, j)] > 1.0 + tolerance:
                        name = f"paircut_{k1}.{i}_{k2}.{j}"
                        cuts.append(
                            Cut(
                                Constraint(
                                    name, [(f"y_{k1}_{i}", 1.0), (f"y_{k2}_{j}", 1.0)], "<=", 1.0
                                ),
                                "pairwise_demand",
                                0,
                            )
                        )
    return cuts


def _lp_point(inst: Instance, values: dict[str, float], prefix: str) -> dict[tuple[int, int], float]:
    out = {}
    for name, v in values.items():
        if name.startswith(prefix + "_"):
            parts = name.split("_")
            out[(int(parts[1]), int(parts[2]))] = v
    return out


def cutting_plane_solve(
    model: MipModel,
    inst: Instance,
    families: tuple[str, ...] = ("cover", "pairwise_demand"),
    round_limit: int = 50,
    tolerance: float = 1e-6,
    backend: str | None = None,
    node_limit: int | None = None,
) -> tuple[MipSolution, CutLog]:
    """Root cutting-plane loop followed by an exact MIP solve.

    Repeats: solve the LP relaxation, run the active separators, add any
    violated cuts.  Stops when no cut is found or round_limit is hit,
    then solves the MIP with all accumulated cuts.  Pivots from the loop
    LPs count toward the reported ticks.
    """
    unknown = set(families) - {"cover", "pairwise_demand"}
    if unknown:
        raise ValueError(f"unknown cut families {sorted(unknown)}")
    work = model.copy_with_extra_constraints([])
    log = CutLog()
    counter = 0
    for round_no in range(1, round_limit + 1):
        log.rounds = round_no
        lp = solve_lp(work, backend=backend)
        log.lp_pivots += lp.pivots
        if lp.status != "optimal":
            break
        found: list[Cut] = []
        if "cover" in families:
            found.extend(separate_cover_cuts(inst, _lp_point(inst, lp.values, "x"), tolerance))
        if "pairwise_demand" in families:
            found.extend(separate_pairwise_demand(inst, _lp_point(inst, lp.values, "y"), tolerance))
        if not found:
            break
        for cut in found:
            counter += 1
            cut.generation_round = round_no
            cut.constraint.name = f"{cut.constraint.name}_r{counter}"
            work.add_constraint(cut.constraint)
            log.cuts.append(cut)
    else:
        log.round_limit_hit = True

    mip = solve_mip(work, node_limit=node_limit, backend=backend)
    total_pivots = mip.pivots + log.lp_pivots
    combined = MipSolution(
        status=mip.status,
        objective=mip.objective,
        values=mip.values,
        nodes=mip.nodes,
        pivots=total_pivots,
        ticks=total_pivots + TICKS_PER_NODE * mip.nodes,
        best_bound=mip.best_bound,
        root_branch_var=mip.root_branch_var,
    )
    return combined, log
