"""Bounded-variable primal simplex iteration loop (numpy implementation).

Mirrors the compiled kernel operation-for-operation: only elementwise
array arithmetic and fixed-order scans are used, so the pivot sequence
and every floating-point value match the Cython backend bit for bit.

Pricing is largest-reduced-cost with a Bland (smallest index) fallback
that engages after a run of degenerate steps, guaranteeing termination.
"""

from __future__ import annotations

import numpy as np

from ._standard_form import FEAS_TOL, INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED

DUAL_TOL = 1e-9  # reduced-cost threshold for entering candidates
PIVOT_TOL = 1e-7  # minimum magnitude of a usable pivot element
RATIO_EPS = 1e-9  # ratio-test tie window
DEGEN_TOL = 1e-12  # step sizes below this count as degenerate
DEGEN_SWITCH = 50  # degenerate steps before switching to Bland's rule
ZERO_TOL = 1e-11  # magnitudes below this are flushed to exact zero
BACKEND_NAME = "python"


def simplex_kernel(T, d1, d2, xB, basis, vstat, lb, ub, pricable, art, phase, max_iter):
    """Run the simplex iteration loop in place; returns (status, iterations)."""
    m, N = T.shape
    iters = 0
    bland = False
    degen_run = 0

    while True:
        if phase == 1:
            infeas = 0.0
            for i in range(m):
                if art[basis[i]]:
                    infeas += xB[i]
            if infeas <= FEAS_TOL:
                phase = 2
                ub[art == 1] = 0.0

        d = d1 if phase == 1 else d2

        score = np.where(vstat == 0, d, -d)
        eligible = (vstat != 2) & (pricable == 1) & (ub - lb > 1e-12)
        score = np.where(eligible, score, np.inf)
        if bland:
            cand = np.nonzero(score < -DUAL_TOL)[0]
            q = int(cand[0]) if cand.size else -1
        else:
            q = int(np.argmin(score)) if N else -1
            if q >= 0 and not (score[q] < -DUAL_TOL):
                q = -1

        if q < 0:
            if phase == 1:
                return (INFEASIBLE, iters)
            return (OPTIMAL, iters)

        if iters >= max_iter:
            return (ITERATION_LIMIT, iters)

        direction = 1.0 if vstat[q] == 0 else -1.0
        alpha = T[:, q].copy()
        a = direction * alpha
        lbB = lb[basis]
        ubB = ub[basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            dec = np.where(a > PIVOT_TOL, (xB - lbB) / a, np.inf)
            inc = np.where(a < -PIVOT_TOL, (ubB - xB) / (-a), np.inf)
        ratios = np.minimum(dec, inc)
        rmin = float(ratios.min()) if m else np.inf
        t_range = ub[q] - lb[q]

        if rmin == np.inf and t_range == np.inf:
            return (UNBOUNDED, iters)

        if t_range <= rmin:
            # bound flip: no basis change
            step = direction * t_range
            xB -= step * alpha
            vstat[q] = 1 - vstat[q]
            t = t_range
        else:
            # leaving row: Bland mode applies the exact anti-cycling rule
            # (smallest basis index among exact minimum-ratio rows); the
            # regular mode widens ties slightly and prefers large pivot
            # magnitudes for tableau stability
            if bland:
                ties = np.nonzero(ratios == rmin)[0]
                r = int(ties[np.argmin(basis[ties])])
            else:
                sel = np.nonzero(ratios <= rmin + RATIO_EPS)[0]
                absa = np.abs(alpha[sel])
                amax = float(absa.max())
                ties = sel[absa == amax]
                r = int(ties[np.argmin(basis[ties])])
            t = rmin if rmin > 0.0 else 0.0
            leave = basis[r]
            step = direction * t
            xB -= step * alpha
            xB[r] = (lb[q] + t) if direction > 0 else (ub[q] - t)
            vstat[leave] = 0 if a[r] > 0 else 1
            piv = alpha[r]
            # dust below ZERO_TOL is flushed after every update; stray
            # near-zeros otherwise masquerade as blocking rows and defeat
            # both the anti-cycling rule and tableau conditioning
            T[r, :] /= piv
            row = T[r, :]
            row[np.abs(row) < ZERO_TOL] = 0.0
            col = alpha.copy()
            col[r] = 0.0
            T -= col[:, None] * row[None, :]
            T[np.abs(T) < ZERO_TOL] = 0.0
            T[:, q] = 0.0
            T[r, q] = 1.0
            f1 = d1[q]
            if f1 != 0.0:
                d1 -= f1 * row
                d1[np.abs(d1) < ZERO_TOL] = 0.0
                d1[q] = 0.0
            f2 = d2[q]
            if f2 != 0.0:
                d2 -= f2 * row
                d2[np.abs(d2) < ZERO_TOL] = 0.0
                d2[q] = 0.0
            basis[r] = q
            vstat[q] = 2

        iters += 1
        if t <= DEGEN_TOL:
            degen_run += 1
            if degen_run > DEGEN_SWITCH:
                bland = True
        else:
            degen_run = 0
            bland = False
