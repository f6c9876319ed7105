"""Dense standard-form arrays and deterministic LP construction.

The tableau is set up once per LP solve: slack basis where feasible,
artificial columns elsewhere, and two maintained reduced-cost rows (the
real objective and the phase-1 infeasibility objective).  Every reduction
that can influence a pivot decision is accumulated in fixed ascending
order so the compiled and pure-Python kernels see bit-identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..model import MipModel

INF = math.inf

SENSE_LE, SENSE_EQ, SENSE_GE = 0, 1, 2
_SENSE_CODE = {"<=": SENSE_LE, "=": SENSE_EQ, ">=": SENSE_GE}

# kernel status codes
OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2, 3

FEAS_TOL = 1e-7  # phase-1 exit / infeasibility declaration


@dataclass
class StandardForm:
    """Maximization problem over structural variables with row senses."""

    names: list[str]
    obj: np.ndarray  # (nv,) maximize coefficients
    A: np.ndarray  # (m, nv) dense
    b: np.ndarray  # (m,)
    senses: np.ndarray  # (m,) int8 codes
    lb: np.ndarray  # (nv,)
    ub: np.ndarray  # (nv,)
    is_binary: np.ndarray  # (nv,) bool
    priority: np.ndarray  # (nv,) int64

    @property
    def nv(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return len(self.b)


def standard_form(model: MipModel) -> StandardForm:
    model.validate()
    index = model.var_index()
    nv = len(model.variables)
    m = len(model.constraints)
    A = np.zeros((m, nv))
    b = np.zeros(m)
    senses = np.zeros(m, dtype=np.int8)
    for ci, con in enumerate(model.constraints):
        b[ci] = con.rhs
        senses[ci] = _SENSE_CODE[con.sense]
        for var, coeff in con.terms:
            A[ci, index[var]] = coeff
    return StandardForm(
        names=[v.name for v in model.variables],
        obj=np.array([v.objective_coeff for v in model.variables]),
        A=A,
        b=b,
        senses=senses,
        lb=np.array([v.lower for v in model.variables]),
        ub=np.array([v.upper for v in model.variables]),
        is_binary=np.array([v.kind == "binary" for v in model.variables]),
        priority=np.array([v.branch_priority for v in model.variables], dtype=np.int64),
    )


DELTA0 = 1e-10  # bound-perturbation base magnitude for the rescue stage


def _perturbation(nv: int) -> list[float]:
    """Deterministic per-column bound shifts (golden-ratio integer hash)."""
    return [DELTA0 * (1.0 + ((j + 1) * 2654435761 % 2**32) / 2**32) for j in range(nv)]


def solve_lp_arrays(
    sf: StandardForm,
    lb_s: np.ndarray,
    ub_s: np.ndarray,
    kernel,
    max_iter: int = 200_000,
) -> tuple[int, np.ndarray, float, float, int]:
    """Solve max sf.obj @ x s.t. rows, lb_s <= x <= ub_s.

    Massively degenerate instances can stall the exact simplex, so the
    solve runs in two deterministic stages: plain arrays under a fixed
    iteration budget, then (only if the budget is exhausted) a fresh
    solve with tiny deterministic bound shifts that break ties.  Rescue
    values are clamped back into the original bounds; the reported
    `bound` stays a valid optimistic bound for branch and bound.

    Returns (status, structural values, objective, bound, pivots).
    """
    budget = min(max_iter, max(2000, 10 * (sf.m + sf.nv + sf.m)))
    status, x, objective, pivots = _solve_stage(sf, lb_s, ub_s, kernel, budget, perturb=False)
    if status != ITERATION_LIMIT:
        return status, x, objective, objective, pivots

    status2, x2, obj_perturbed, pivots2 = _solve_stage(
        sf, lb_s, ub_s, kernel, max_iter, perturb=True
    )
    total = pivots + pivots2
    if status2 == ITERATION_LIMIT:
        return ITERATION_LIMIT, x2, obj_perturbed, obj_perturbed, total
    np.clip(x2, lb_s, ub_s, out=x2)
    objective2 = 0.0
    for j in range(sf.nv):
        if x2[j] != 0.0 and sf.obj[j] != 0.0:
            objective2 += sf.obj[j] * x2[j]
    bound = obj_perturbed if obj_perturbed > objective2 else objective2
    return status2, x2, objective2, bound, total


def _solve_stage(
    sf: StandardForm,
    lb_s: np.ndarray,
    ub_s: np.ndarray,
    kernel,
    max_iter: int,
    perturb: bool,
) -> tuple[int, np.ndarray, float, int]:
    nv, m = sf.nv, sf.m
    n_slack = m

    # slack bounds by row sense: s = b - a.x
    slack_lb = np.where(sf.senses == SENSE_GE, -INF, 0.0)
    slack_ub = np.where(sf.senses == SENSE_LE, INF, 0.0)

    if perturb:
        # shifting slack bounds perturbs the right-hand sides, which is
        # what breaks the degenerate ties of zero-rhs equality rows
        delta = np.array(_perturbation(nv + n_slack))
        lb_s = np.where(np.isfinite(lb_s), lb_s - delta[:nv], lb_s)
        ub_s = np.where(np.isfinite(ub_s), ub_s + delta[:nv], ub_s)
        slack_lb = np.where(np.isfinite(slack_lb), slack_lb - delta[nv:], slack_lb)
        slack_ub = np.where(np.isfinite(slack_ub), slack_ub + delta[nv:], slack_ub)

    # nonbasic start: structurals at a finite bound (lower preferred)
    at_lower = np.isfinite(lb_s)
    xval = np.where(at_lower, lb_s, ub_s)

    # row activity, accumulated in ascending column order
    act = np.zeros(m)
    for j in np.nonzero(xval != 0.0)[0]:
        act += sf.A[:, j] * xval[j]

    slack_val = sf.b - act
    need_art = []
    slack_stat = np.full(m, 2, dtype=np.int8)  # 2 = basic
    slack_clamped = slack_val.copy()
    for i in range(m):
        if slack_val[i] < slack_lb[i]:
            slack_stat[i] = 0
            slack_clamped[i] = slack_lb[i]
            need_art.append(i)
        elif slack_val[i] > slack_ub[i]:
            slack_stat[i] = 1
            slack_clamped[i] = slack_ub[i]
            need_art.append(i)

    n_art = len(need_art)
    N = nv + n_slack + n_art

    T = np.zeros((m, N))
    T[:, :nv] = sf.A
    T[np.arange(m), nv + np.arange(m)] = 1.0

    lb = np.concatenate([lb_s, slack_lb, np.zeros(n_art)])
    ub = np.concatenate([ub_s, slack_ub, np.full(n_art, INF)])
    vstat = np.concatenate(
        [np.where(at_lower, 0, 1).astype(np.int8), slack_stat, np.full(n_art, 2, dtype=np.int8)]
    )
    basis = np.arange(nv, nv + m, dtype=np.intp)
    xB = slack_val.copy()

    art = np.zeros(N, dtype=np.int8)
    for a_idx, row in enumerate(need_art):
        col = nv + n_slack + a_idx
        art[col] = 1
        resid = slack_val[row] - slack_clamped[row]
        sigma = 1.0 if resid >= 0 else -1.0
        T[row, col] = sigma
        if sigma < 0:
            T[row, :] = -T[row, :]
        basis[row] = col
        xB[row] = abs(resid)

    pricable = np.ones(N, dtype=np.int8)
    pricable[art == 1] = 0

    # phase-2 reduced costs (minimize -obj); zero-cost slack/artificial basis
    d2 = np.concatenate([-sf.obj, np.zeros(n_slack + n_art)])
    # phase-1 reduced costs: unit cost on artificials, priced out row by row
    d1 = np.zeros(N)
    d1[art == 1] = 1.0
    for i in range(m):
        if art[basis[i]]:
            d1 -= T[i]

    phase = 1 if n_art else 2
    status, iters = kernel(T, d1, d2, xB, basis, vstat, lb, ub, pricable, art, phase, max_iter)

    xfull = np.where(vstat == 1, ub, np.where(np.isfinite(lb), lb, 0.0))
    xfull[basis] = xB
    x = xfull[:nv].copy()

    objective = 0.0
    for j in range(nv):
        if x[j] != 0.0 and sf.obj[j] != 0.0:
            objective += sf.obj[j] * x[j]
    return status, x, objective, iters
