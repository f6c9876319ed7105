# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bounded-variable primal simplex iteration loop (compiled kernel).

Operation-for-operation mirror of the numpy fallback in _simplex_py.py;
the module is compiled with -ffp-contract=off so every floating-point
intermediate matches the fallback bit for bit.
"""

import numpy as np

from libc.math cimport INFINITY, fabs

from ._standard_form import FEAS_TOL as _FEAS_TOL

cdef double FEAS_TOL = _FEAS_TOL
cdef double DUAL_TOL = 1e-9
cdef double PIVOT_TOL = 1e-7
cdef double RATIO_EPS = 1e-9
cdef double DEGEN_TOL = 1e-12
cdef double ZERO_TOL = 1e-11
cdef int DEGEN_SWITCH = 50

BACKEND_NAME = "cython"


def simplex_kernel(double[:, ::1] T, double[::1] d1, double[::1] d2,
                   double[::1] xB, Py_ssize_t[::1] basis, signed char[::1] vstat,
                   double[::1] lb, double[::1] ub, signed char[::1] pricable,
                   signed char[::1] art, int phase, long max_iter):
    """Run the simplex iteration loop in place; returns (status, iterations)."""
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t N = T.shape[1]
    cdef long iters = 0
    cdef bint bland = False
    cdef int degen_run = 0

    cdef Py_ssize_t i, j, q, r, leave, best_basis
    cdef double infeas, sj, best_score, direction, a, cand, rmin, t_range, t
    cdef double step, piv, f1, f2, lo, hi, thresh, amax, aa
    alpha_arr = np.empty(m, dtype=np.float64)
    ratio_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] ratio = ratio_arr
    cdef double[::1] d

    while True:
        if phase == 1:
            infeas = 0.0
            for i in range(m):
                if art[basis[i]]:
                    infeas += xB[i]
            if infeas <= FEAS_TOL:
                phase = 2
                for j in range(N):
                    if art[j]:
                        ub[j] = 0.0

        if phase == 1:
            d = d1
        else:
            d = d2

        # entering column: largest reduced cost, or smallest index in Bland mode
        q = -1
        best_score = -DUAL_TOL
        for j in range(N):
            if vstat[j] == 2 or pricable[j] == 0:
                continue
            if not (ub[j] - lb[j] > 1e-12):
                continue
            sj = d[j] if vstat[j] == 0 else -d[j]
            if sj < best_score:
                q = j
                if bland:
                    break
                best_score = sj

        if q < 0:
            if phase == 1:
                return (1, iters)  # infeasible
            return (0, iters)  # optimal

        if iters >= max_iter:
            return (3, iters)

        direction = 1.0 if vstat[q] == 0 else -1.0

        # pass 1: per-row blocking ratios and their minimum
        rmin = INFINITY
        for i in range(m):
            alpha[i] = T[i, q]
            a = direction * alpha[i]
            if a > PIVOT_TOL:
                lo = lb[basis[i]]
                if lo == -INFINITY:
                    ratio[i] = INFINITY
                    continue
                cand = (xB[i] - lo) / a
            elif a < -PIVOT_TOL:
                hi = ub[basis[i]]
                if hi == INFINITY:
                    ratio[i] = INFINITY
                    continue
                cand = (hi - xB[i]) / (-a)
            else:
                ratio[i] = INFINITY
                continue
            ratio[i] = cand
            if cand < rmin:
                rmin = cand

        t_range = ub[q] - lb[q]

        if rmin == INFINITY and t_range == INFINITY:
            return (2, iters)  # unbounded

        if t_range <= rmin:
            step = direction * t_range
            for i in range(m):
                xB[i] = xB[i] - step * alpha[i]
            vstat[q] = 1 - vstat[q]
            t = t_range
        else:
            # leaving row: Bland mode applies the exact anti-cycling rule
            # (smallest basis index among exact minimum-ratio rows); the
            # regular mode widens ties slightly and prefers large pivot
            # magnitudes for tableau stability
            r = -1
            best_basis = 0
            if bland:
                for i in range(m):
                    if ratio[i] == rmin:
                        if r < 0 or basis[i] < best_basis:
                            r = i
                            best_basis = basis[i]
            else:
                thresh = rmin + RATIO_EPS
                amax = 0.0
                for i in range(m):
                    if ratio[i] <= thresh:
                        aa = fabs(alpha[i])
                        if aa > amax:
                            amax = aa
                for i in range(m):
                    if ratio[i] <= thresh and fabs(alpha[i]) == amax:
                        if r < 0 or basis[i] < best_basis:
                            r = i
                            best_basis = basis[i]
            t = rmin if rmin > 0.0 else 0.0
            leave = basis[r]
            step = direction * t
            for i in range(m):
                xB[i] = xB[i] - step * alpha[i]
            xB[r] = (lb[q] + t) if direction > 0 else (ub[q] - t)
            vstat[leave] = 0 if direction * alpha[r] > 0 else 1
            piv = alpha[r]
            # dust below ZERO_TOL is flushed after every update; stray
            # near-zeros otherwise masquerade as blocking rows and defeat
            # both the anti-cycling rule and tableau conditioning
            for j in range(N):
                a = T[r, j] / piv
                T[r, j] = a if not (fabs(a) < ZERO_TOL) else 0.0
            for i in range(m):
                if i == r:
                    continue
                f1 = alpha[i]
                if f1 != 0.0:
                    for j in range(N):
                        a = T[i, j] - f1 * T[r, j]
                        T[i, j] = a if not (fabs(a) < ZERO_TOL) else 0.0
                T[i, q] = 0.0
            T[r, q] = 1.0
            f1 = d1[q]
            if f1 != 0.0:
                for j in range(N):
                    a = d1[j] - f1 * T[r, j]
                    d1[j] = a if not (fabs(a) < ZERO_TOL) else 0.0
                d1[q] = 0.0
            f2 = d2[q]
            if f2 != 0.0:
                for j in range(N):
                    a = d2[j] - f2 * T[r, j]
                    d2[j] = a if not (fabs(a) < ZERO_TOL) else 0.0
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
