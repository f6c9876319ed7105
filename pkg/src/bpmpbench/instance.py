"""Backhaul problem instances: generation, validation, JSON serialization.

An instance describes a vehicle that must travel from node 1 (its current
location) to node n (its depot) within a distance budget D, choosing among
point-to-point delivery requests.  Requests are stored as a dense n x n
matrix with 0 meaning "no request"; model builders skip zero entries.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator


class InstanceError(ValueError):
    """Raised for malformed instance files or invariant violations."""


@dataclass(frozen=True)
class GenParams:
    """Generation knobs.  Nodes are placed uniformly in a box_size square;
    each eligible pair carries a request with probability density, with a
    weight drawn uniformly from [weight_lo, weight_hi] * capacity."""

    box_size: float = 100.0
    density: float = 0.7
    weight_lo: float = 0.1
    weight_hi: float = 1.0
    slack_factor: float = 3.0
    capacity: float = 10.0
    price: float = 2.0
    cost: float = 1.0
    vehicle_weight: float = 5.0


@dataclass(frozen=True)
class Instance:
    """Immutable problem data.  Nodes are numbered 1..n; matrices are
    0-indexed, so dist[i - 1][j - 1] is the distance from node i to node j."""

    n: int
    dist: tuple[tuple[float, ...], ...]
    req_weight: tuple[tuple[float, ...], ...]
    capacity: float
    max_distance: float
    price: float
    cost: float
    vehicle_weight: float

    def d(self, i: int, j: int) -> float:
        """Distance from node i to node j (1-based)."""
        return self.dist[i - 1][j - 1]

    def w(self, k: int, l: int) -> float:
        """Request weight from node k to node l (1-based), 0 if absent."""
        return self.req_weight[k - 1][l - 1]

    def arcs(self) -> Iterator[tuple[int, int]]:
        """Usable arcs: (i, j) with i != j, no arc into node 1 or out of node n."""
        for i in range(1, self.n):
            for j in range(2, self.n + 1):
                if i != j:
                    yield (i, j)

    def requests(self) -> Iterator[tuple[int, int]]:
        """Existing requests in canonical (k, l) order."""
        for k, l in self.arcs():
            if self.req_weight[k - 1][l - 1] > 0:
                yield (k, l)

    def shortest_path_1n(self) -> float:
        """Shortest 1 -> n distance (Floyd-Warshall on the full matrix)."""
        n = self.n
        sp = [list(row) for row in self.dist]
        for m in range(n):
            sp_m = sp[m]
            for i in range(n):
                d_im = sp[i][m]
                row = sp[i]
                for j in range(n):
                    alt = d_im + sp_m[j]
                    if alt < row[j]:
                        row[j] = alt
        return sp[0][n - 1]


def generate(n: int, seed: int, params: GenParams | None = None) -> Instance:
    """Generate a deterministic random instance.

    Pure function of (n, seed, params): Euclidean distances on uniformly
    placed nodes, rounded to 2 decimals, and D = slack_factor * dist(1, n).
    """
    params = params or GenParams()
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not (0.0 < params.density <= 1.0):
        raise ValueError(f"density must be in (0, 1], got {params.density}")
    if params.slack_factor <= 1.0:
        raise ValueError(f"slack_factor must be > 1, got {params.slack_factor}")
    if not (0.0 < params.weight_lo <= params.weight_hi <= 1.0):
        raise ValueError("weight range must satisfy 0 < lo <= hi <= 1")
    for name in ("capacity", "price", "cost", "vehicle_weight", "box_size"):
        if getattr(params, name) <= 0:
            raise ValueError(f"{name} must be positive")

    rng = random.Random(seed)
    pts = [(rng.uniform(0.0, params.box_size), rng.uniform(0.0, params.box_size)) for _ in range(n)]
    dist = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(0.0)
            else:
                d = math.dist(pts[i], pts[j])
                # coincident points after rounding would break dist > 0
                row.append(max(round(d, 2), 0.01))
        dist.append(tuple(row))

    q = params.capacity
    req = [[0.0] * n for _ in range(n)]
    for k in range(1, n):  # k != n
        for l in range(2, n + 1):  # l != 1
            if k == l:
                continue
            if rng.random() < params.density:
                req[k - 1][l - 1] = round(rng.uniform(params.weight_lo * q, params.weight_hi * q), 2)

    inst = Instance(
        n=n,
        dist=tuple(dist),
        req_weight=tuple(tuple(r) for r in req),
        capacity=q,
        max_distance=round(params.slack_factor * dist[0][n - 1], 2),
        price=params.price,
        cost=params.cost,
        vehicle_weight=params.vehicle_weight,
    )
    violations = validate(inst)
    if violations:  # pragma: no cover - generator is constructed to pass
        raise InstanceError("generated instance invalid: " + "; ".join(violations))
    return inst


def validate(inst: Instance) -> list[str]:
    """Return all invariant violations, each naming the field and rule."""
    out: list[str] = []
    n = inst.n
    if n < 2:
        out.append("n: node count must be at least 2")
        return out
    if len(inst.dist) != n or any(len(r) != n for r in inst.dist):
        out.append("dist: matrix must be n x n")
        return out
    if len(inst.req_weight) != n or any(len(r) != n for r in inst.req_weight):
        out.append("req_weight: matrix must be n x n")
        return out

    if inst.capacity <= 0:
        out.append("Q: capacity must be positive")
    if inst.max_distance <= 0:
        out.append("D: max distance must be positive")
    if inst.price <= 0:
        out.append("p: price must be positive")
    if inst.cost <= 0:
        out.append("c: cost must be positive")
    if inst.vehicle_weight <= 0:
        out.append("v: vehicle weight must be positive")

    for i in range(n):
        for j in range(n):
            d = inst.dist[i][j]
            if i == j and d != 0:
                out.append(f"dist[{i + 1}][{j + 1}]: diagonal distance nonzero")
            elif i != j and d <= 0:
                out.append(f"dist[{i + 1}][{j + 1}]: off-diagonal distance must be positive")

    for k in range(n):
        for l in range(n):
            w = inst.req_weight[k][l]
            if w < 0:
                out.append(f"req_weight[{k + 1}][{l + 1}]: request weight negative")
            elif w > 0:
                if k == l:
                    out.append(f"req_weight[{k + 1}][{l + 1}]: self-request not allowed")
                elif l == 0:
                    out.append(f"req_weight[{k + 1}][{l + 1}]: request into origin node 1")
                elif k == n - 1:
                    out.append(f"req_weight[{k + 1}][{l + 1}]: request out of depot node {n}")
                elif inst.capacity > 0 and w > inst.capacity:
                    out.append(f"req_weight[{k + 1}][{l + 1}]: request exceeds capacity")

    if not out and inst.shortest_path_1n() > inst.max_distance:
        out.append("D: no route from node 1 to node n within the distance limit")
    return out


_FIELD_ORDER = ("n", "p", "c", "v", "Q", "D", "dist", "req_weight")


def to_json(inst: Instance) -> str:
    """Serialize with fixed field order and full float precision (byte-stable)."""
    doc = {
        "n": inst.n,
        "p": inst.price,
        "c": inst.cost,
        "v": inst.vehicle_weight,
        "Q": inst.capacity,
        "D": inst.max_distance,
        "dist": [list(r) for r in inst.dist],
        "req_weight": [list(r) for r in inst.req_weight],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> Instance:
    """Parse and validate an instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"instance file is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance file: top level must be an object")
    missing = [k for k in _FIELD_ORDER if k not in doc]
    if missing:
        raise InstanceError(f"instance file: missing fields {missing}")
    try:
        inst = Instance(
            n=int(doc["n"]),
            dist=tuple(tuple(float(v) for v in row) for row in doc["dist"]),
            req_weight=tuple(tuple(float(v) for v in row) for row in doc["req_weight"]),
            capacity=float(doc["Q"]),
            max_distance=float(doc["D"]),
            price=float(doc["p"]),
            cost=float(doc["c"]),
            vehicle_weight=float(doc["v"]),
        )
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"instance file: malformed field value ({exc})") from exc
    violations = validate(inst)
    if violations:
        raise InstanceError("instance invalid: " + "; ".join(violations))
    return inst


def save(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(to_json(inst), encoding="utf-8")


def load(path: str | Path) -> Instance:
    p = Path(path)
    if not p.exists():
        raise InstanceError(f"instance file not found: {p}")
    return from_json(p.read_text(encoding="utf-8"))
