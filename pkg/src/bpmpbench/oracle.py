"""Exhaustive exact solver used as ground truth in tests.

Enumerates every simple route from node 1 to node n within the distance
budget, then searches request subsets per route with per-arc capacity
checks.  Exponential by design; size guards make misuse loud.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .instance import Instance

MAX_NODES = 10
MAX_ROUTE_REQUESTS = 22
CAP_EPS = 1e-9


class SizeGuardError(ValueError):
    """Raised when a problem is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class ExactSolution:
    route: tuple[int, ...]
    accepted: tuple[tuple[int, int], ...]
    objective: float
    arc_loads: dict[tuple[int, int], float]

    def to_json_dict(self) -> dict:
        return {
            "route": list(self.route),
            "accepted": [list(r) for r in self.accepted],
            "objective": self.objective,
            "arc_loads": {f"{i}-{j}": v for (i, j), v in sorted(self.arc_loads.items())},
        }


def enumerate_routes(inst: Instance) -> list[tuple[int, ...]]:
    """All simple 1 -> n paths with total distance <= D, in DFS order
    (neighbors visited in ascending node order)."""
    if inst.n > MAX_NODES:
        raise SizeGuardError(f"route enumeration limited to n <= {MAX_NODES}, got n = {inst.n}")
    n, D = inst.n, inst.max_distance
    routes: list[tuple[int, ...]] = []
    path = [1]
    visited = [False] * (n + 1)
    visited[1] = True

    def dfs(cur: int, dist: float) -> None:
        if cur == n:
            routes.append(tuple(path))
            return
        for nxt in range(2, n + 1):  # no arcs back into node 1
            if visited[nxt]:
                continue
            d2 = dist + inst.d(cur, nxt)
            if d2 > D:
                continue
            visited[nxt] = True
            path.append(nxt)
            dfs(nxt, d2)
            path.pop()
            visited[nxt] = False

    dfs(1, 0.0)
    return routes


def route_distance(inst: Instance, route: tuple[int, ...]) -> float:
    return sum(inst.d(route[t], route[t + 1]) for t in range(len(route) - 1))


def _on_route_requests(inst: Instance, route: tuple[int, ...]) -> list[tuple[int, int, float, float]]:
    """Requests with both endpoints on the route, origin first.

    Returns (k, l, weight, net profit) with net profit evaluated against
    the carrying cost along this route's k -> l segment.
    """
    pos = {node: t for t, node in enumerate(route)}
    seg = [0.0]
    for t in range(len(route) - 1):
        seg.append(seg[-1] + inst.d(route[t], route[t + 1]))
    out = []
    for k, l in inst.requests():
        if k in pos and l in pos and pos[k] < pos[l]:
            w = inst.w(k, l)
            carry = inst.cost * w * (seg[pos[l]] - seg[pos[k]])
            revenue = inst.price * inst.d(k, l) * w
            out.append((k, l, w, revenue - carry))
    return out


def best_request_set(
    inst: Instance, route: tuple[int, ...]
) -> tuple[tuple[tuple[int, int], ...], float]:
    """Maximum-profit capacity-feasible subset of on-route requests.

    Exhaustive DFS over requests in canonical order; profit ties resolve
    to the lexicographically smallest accepted set.
    """
    reqs = _on_route_requests(inst, route)
    if len(reqs) > MAX_ROUTE_REQUESTS:
        raise SizeGuardError(
            f"subset search limited to {MAX_ROUTE_REQUESTS} on-route requests, got {len(reqs)}"
        )
    pos = {node: t for t, node in enumerate(route)}
    n_arcs = len(route) - 1
    base = -inst.cost * inst.vehicle_weight * route_distance(inst, route)
    q = inst.capacity

    # suffix sums of positive net profits for bound pruning
    suffix = [0.0] * (len(reqs) + 1)
    for t in range(len(reqs) - 1, -1, -1):
        suffix[t] = suffix[t + 1] + max(0.0, reqs[t][3])

    best_profit = base
    best_set: tuple[tuple[int, int], ...] = ()
    loads = [0.0] * n_arcs
    chosen: list[tuple[int, int]] = []

    def dfs(t: int, profit: float) -> None:
        nonlocal best_profit, best_set
        if profit + suffix[t] < best_profit:
            return
        if t == len(reqs):
            cand = tuple(chosen)
            if profit > best_profit or (profit == best_profit and cand < best_set):
                best_profit = profit
                best_set = cand
            return
        k, l, w, net = reqs[t]
        a, b = pos[k], pos[l]
        if all(loads[arc] + w <= q + CAP_EPS for arc in range(a, b)):
            for arc in range(a, b):
                loads[arc] += w
            chosen.append((k, l))
            dfs(t + 1, profit + net)
            chosen.pop()
            for arc in range(a, b):
                loads[arc] -= w
        dfs(t + 1, profit)

    dfs(0, base)
    return best_set, best_profit


def solve_exact(inst: Instance) -> ExactSolution:
    """Global optimum over all (route, request subset) pairs.

    Ties break toward the shorter route, then the lexicographically
    smaller route sequence.
    """
    if inst.n > MAX_NODES:
        raise SizeGuardError(f"exact solve limited to n <= {MAX_NODES}, got n = {inst.n}")
    best = None  # (objective, route, accepted, route_dist)
    for route in enumerate_routes(inst):
        accepted, objective = best_request_set(inst, route)
        rd = route_distance(inst, route)
        if best is None:
            best = (objective, route, accepted, rd)
            continue
        b_obj, b_route, _, b_rd = best
        if objective > b_obj or (
            objective == b_obj and (rd < b_rd or (rd == b_rd and route < b_route))
        ):
            best = (objective, route, accepted, rd)
    if best is None:
        raise SizeGuardError("no feasible route within the distance limit")
    objective, route, accepted, _ = best
    pos = {node: t for t, node in enumerate(route)}
    loads: dict[tuple[int, int], float] = {}
    for t in range(len(route) - 1):
        arc = (route[t], route[t + 1])
        loads[arc] = sum(
            inst.w(k, l) for k, l in accepted if pos[k] <= t < pos[l]
        )
    return ExactSolution(route=route, accepted=accepted, objective=objective, arc_loads=loads)


def iter_feasible_solutions(
    inst: Instance,
) -> Iterator[tuple[tuple[int, ...], tuple[tuple[int, int], ...]]]:
    """Yield every (route, capacity-feasible accepted set) pair.

    Used to check that generated cuts never exclude an integer-feasible
    solution.  DFS prunes as soon as an arc load exceeds capacity.
    """
    for route in enumerate_routes(inst):
        reqs = _on_route_requests(inst, route)
        if len(reqs) > MAX_ROUTE_REQUESTS:
            raise SizeGuardError("too many on-route requests for feasibility enumeration")
        pos = {node: t for t, node in enumerate(route)}
        n_arcs = len(route) - 1
        loads = [0.0] * n_arcs
        chosen: list[tuple[int, int]] = []
        out: list[tuple[tuple[int, int], ...]] = []

        def dfs(t: int) -> None:
            if t == len(reqs):
                out.append(tuple(chosen))
                return
            k, l, w, _ = reqs[t]
            a, b = pos[k], pos[l]
            if all(loads[arc] + w <= inst.capacity + CAP_EPS for arc in range(a, b)):
                for arc in range(a, b):
                    loads[arc] += w
                chosen.append((k, l))
                dfs(t + 1)
                chosen.pop()
                for arc in range(a, b):
                    loads[arc] -= w
            dfs(t + 1)

        dfs(0)
        for accepted in out:
            yield route, accepted


def objective_of(inst: Instance, route: tuple[int, ...], accepted) -> float:
    """Profit of an explicit (route, accepted) pair, for cross-checks."""
    pos = {node: t for t, node in enumerate(route)}
    seg = [0.0]
    for t in range(len(route) - 1):
        seg.append(seg[-1] + inst.d(route[t], route[t + 1]))
    total = -inst.cost * inst.vehicle_weight * seg[-1]
    for k, l in accepted:
        w = inst.w(k, l)
        total += inst.price * inst.d(k, l) * w - inst.cost * w * (seg[pos[l]] - seg[pos[k]])
    return total
