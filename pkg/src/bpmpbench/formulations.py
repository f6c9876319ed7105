"""Node-arc and triples MIP builders for the backhaul profit problem.

Both formulations route a vehicle over a simple path from node 1 to node n
(depot-departure/arrival, flow conservation, a distance budget, and MTZ
sequence constraints) and price accepted requests into the objective.  The
node-arc form tracks each request's path with per-arc binaries; the triples
form replaces them with continuous flow-splitting variables.

Techniques 1-11 are declarative transformations:

  t1  replace the static capacity row with theta <= Q * x (conditional arc flow)
  t2  drop node-degree rows (MTZ already forbids revisits in integer solutions)
  t3  add single-node demand rows (total accepted weight per node <= Q)
  t4  drop the big-M x-z linking rows (valid only together with t1)
  t5  give route binaries branching priority over all other binaries
  t6  replace interior MTZ rows with their lifted form
  t7  bound the sequence variables to 1 <= s_i <= n - 1 for i >= 2
  t8  cover-cut separation (activation flag; rows are generated by the solver)
  t9  pairwise-demand separation (activation flag, as t8)
  t10 drop the u-x linking rows of the triples form
  t11 add node-degree rows to the triples form
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .instance import Instance
from .model import Constraint, MipModel, Variable

NODE_ARC = "node-arc"
TRIPLES = "triples"

_NODE_ARC_FLAGS = ("t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9")
_TRIPLES_FLAGS = ("t10", "t11")
ALL_FLAGS = _NODE_ARC_FLAGS + _TRIPLES_FLAGS


@dataclass(frozen=True)
class TechniqueSet:
    t1_conditional_arc_flow: bool = False
    t2_relax_node_degree: bool = False
    t3_single_node_demand: bool = False
    t4_relax_xz_linking: bool = False
    t5_branch_priority: bool = False
    t6_lifted_mtz: bool = False
    t7_mtz_upper_bound: bool = False
    t8_cover_cuts: bool = False
    t9_pairwise_demand_cuts: bool = False
    t10_relax_triples_linking: bool = False
    t11_enforce_node_degree: bool = False
    big_m_value: int | None = None  # None: use the number of requests

    def flag(self, tag: str) -> bool:
        return getattr(self, self._field_of(tag))

    def with_flag(self, tag: str, value: bool = True) -> "TechniqueSet":
        return replace(self, **{self._field_of(tag): value})

    @staticmethod
    def _field_of(tag: str) -> str:
        for f in TechniqueSet.__dataclass_fields__:
            if f == tag or f.startswith(tag + "_"):
                return f
        raise ValueError(f"unknown technique {tag!r}")

    def active_flags(self) -> tuple[str, ...]:
        return tuple(t for t in ALL_FLAGS if self.flag(t))

    def to_list(self) -> str:
        return ",".join(self.active_flags())

    @classmethod
    def from_list(cls, text: str) -> "TechniqueSet":
        ts = cls()
        for tag in filter(None, (t.strip() for t in text.split(","))):
            ts = ts.with_flag(tag, True)
        return ts

    def check(self, formulation: str) -> None:
        if formulation not in (NODE_ARC, TRIPLES):
            raise ValueError(f"unknown formulation {formulation!r}")
        bad = _TRIPLES_FLAGS if formulation == NODE_ARC else _NODE_ARC_FLAGS
        for tag in bad:
            if self.flag(tag):
                raise ValueError(f"technique {tag} is not valid for the {formulation} formulation")
        if formulation == NODE_ARC and self.flag("t4") and not self.flag("t1"):
            raise ValueError("technique t4 requires t1 (conditional arc flow must bound theta)")
        if self.big_m_value is not None and self.big_m_value <= 0:
            raise ValueError("big_m_value must be a positive integer")

    def cut_families(self) -> tuple[str, ...]:
        fams = []
        if self.t8_cover_cuts:
            fams.append("cover")
        if self.t9_pairwise_demand_cuts:
            fams.append("pairwise_demand")
        return tuple(fams)


PRESETS = {
    "original_node_arc": (NODE_ARC, ()),
    "best_node_arc": (NODE_ARC, ("t1", "t2", "t4", "t5")),
    "original_triples": (TRIPLES, ()),
    "best_triples": (TRIPLES, ("t10", "t11")),
}


def apply_preset(name: str) -> tuple[str, TechniqueSet]:
    """Resolve a preset name to (formulation, technique set)."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    formulation, tags = PRESETS[name]
    ts = TechniqueSet()
    for tag in tags:
        ts = ts.with_flag(tag, True)
    return formulation, ts


def arc_set(n: int) -> list[tuple[int, int]]:
    """Usable arcs: i != j, no arc into node 1, none out of node n."""
    return [(i, j) for i in range(1, n) for j in range(2, n + 1) if i != j]


def request_set(inst: Instance) -> list[tuple[int, int]]:
    return list(inst.requests())


def triple_set(n: int) -> list[tuple[int, int, int]]:
    """Flow-splitting triples (i, j, k): route flow i -> j via first arc (i, k).

    Both the first arc (i, k) and the remainder arc (k, j) must be usable
    arcs; otherwise the balance rows would let flow appear or vanish.
    """
    arcs = set(arc_set(n))
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                if i != j and j != k and i != k and (i, k) in arcs and (k, j) in arcs:
                    out.append((i, j, k))
    return out


def _route_variables(inst: Instance, model: MipModel, priority_x: int) -> None:
    c, v, p = inst.cost, inst.vehicle_weight, inst.price
    for i, j in arc_set(inst.n):
        model.add_variable(
            Variable(
                name=f"x_{i}_{j}",
                kind="binary",
                upper=1.0,
                objective_coeff=-c * v * inst.d(i, j),
                branch_priority=priority_x,
            )
        )
    for k, l in request_set(inst):
        model.add_variable(
            Variable(
                name=f"y_{k}_{l}",
                kind="binary",
                upper=1.0,
                objective_coeff=p * inst.d(k, l) * inst.w(k, l),
            )
        )


def _flow_and_sequence_variables(inst: Instance, model: MipModel, t7: bool) -> None:
    n = inst.n
    for i, j in arc_set(n):
        model.add_variable(
            Variable(name=f"th_{i}_{j}", objective_coeff=-inst.cost * inst.d(i, j))
        )
    for i in range(1, n + 1):
        if t7 and i >= 2:
            model.add_variable(Variable(name=f"s_{i}", lower=1.0, upper=float(n - 1)))
        else:
            model.add_variable(Variable(name=f"s_{i}"))


def _route_constraints(inst: Instance, model: MipModel, ts: TechniqueSet, node_degree: bool) -> None:
    n = inst.n
    arcs = arc_set(n)
    arcs_in = {k: [(i, j) for i, j in arcs if j == k] for k in range(1, n + 1)}
    arcs_out = {k: [(i, j) for i, j in arcs if i == k] for k in range(1, n + 1)}

    model.add_constraint(
        Constraint("depart", [(f"x_1_{j}", 1.0) for _, j in arcs_out[1]], "=", 1.0)
    )
    model.add_constraint(
        Constraint("arrive", [(f"x_{i}_{n}", 1.0) for i, _ in arcs_in[n]], "=", 1.0)
    )
    for k in range(2, n):
        terms = [(f"x_{i}_{k}", 1.0) for i, _ in arcs_in[k]]
        terms += [(f"x_{k}_{j}", -1.0) for _, j in arcs_out[k]]
        model.add_constraint(Constraint(f"conserve_{k}", terms, "=", 0.0))
    model.add_constraint(
        Constraint("dist", [(f"x_{i}_{j}", inst.d(i, j)) for i, j in arcs], "<=", inst.max_distance)
    )
    if node_degree:
        for k in range(2, n + 1):
            terms = [(f"x_{i}_{k}", 1.0) for i, _ in arcs_in[k]]
            model.add_constraint(Constraint(f"degree_{k}", terms, "<=", 1.0))

    lifted = ts.t6_lifted_mtz
    for i, j in arcs:
        if lifted and i != 1 and j != n:
            # lifted form only exists for interior node pairs
            model.add_constraint(
                Constraint(
                    f"mtzl_{i}_{j}",
                    [(f"s_{i}", 1.0), (f"s_{j}", -1.0), (f"x_{i}_{j}", float(n - 1)), (f"x_{j}_{i}", float(n - 3))],
                    "<=",
                    float(n - 2),
                )
            )
        else:
            model.add_constraint(
                Constraint(
                    f"mtz_{i}_{j}",
                    [(f"s_{i}", 1.0), (f"s_{j}", -1.0), (f"x_{i}_{j}", float(n + 1))],
                    "<=",
                    float(n),
                )
            )


def single_node_demand_rows(inst: Instance) -> list[Constraint]:
    """Per-node accepted-weight caps: one row per node with outgoing
    requests and one per node with incoming requests."""
    rows: list[Constraint] = []
    reqs = request_set(inst)
    for i in range(1, inst.n + 1):
        terms = [(f"y_{k}_{l}", inst.w(k, l)) for k, l in reqs if k == i]
        if terms:
            rows.append(Constraint(f"demout_{i}", terms, "<=", inst.capacity))
    for j in range(1, inst.n + 1):
        terms = [(f"y_{k}_{l}", inst.w(k, l)) for k, l in reqs if l == j]
        if terms:
            rows.append(Constraint(f"demin_{j}", terms, "<=", inst.capacity))
    return rows


def build_node_arc(inst: Instance, ts: TechniqueSet | None = None) -> MipModel:
    """Node-arc formulation with per-request, per-arc routing binaries."""
    ts = ts or TechniqueSet()
    ts.check(NODE_ARC)
    n = inst.n
    arcs = arc_set(n)
    reqs = request_set(inst)
    big_m = ts.big_m_value if ts.big_m_value is not None else max(1, len(reqs))

    model = MipModel(
        name=f"bpmp_node_arc_n{n}",
        metadata={"formulation": NODE_ARC, "techniques": ts.to_list(), "n": n},
    )
    _route_variables(inst, model, priority_x=10 if ts.t5_branch_priority else 0)
    for k, l in reqs:
        for i, j in arcs:
            model.add_variable(Variable(name=f"z_{k}_{l}_{i}_{j}", kind="binary", upper=1.0))
    _flow_and_sequence_variables(inst, model, ts.t7_mtz_upper_bound)

    _route_constraints(inst, model, ts, node_degree=not ts.t2_relax_node_degree)

    if not ts.t4_relax_xz_linking:
        for i, j in arcs:
            terms = [(f"z_{k}_{l}_{i}_{j}", 1.0) for k, l in reqs]
            terms.append((f"x_{i}_{j}", -float(big_m)))
            model.add_constraint(Constraint(f"linkxz_{i}_{j}", terms, "<=", 0.0))

    for k, l in reqs:
        out_terms = [(f"z_{k}_{l}_{k}_{j}", 1.0) for i, j in arcs if i == k]
        out_terms.append((f"y_{k}_{l}", -1.0))
        model.add_constraint(Constraint(f"yzout_{k}_{l}", out_terms, "=", 0.0))
        in_terms = [(f"z_{k}_{l}_{i}_{l}", 1.0) for i, j in arcs if j == l]
        in_terms.append((f"y_{k}_{l}", -1.0))
        model.add_constraint(Constraint(f"yzin_{k}_{l}", in_terms, "=", 0.0))

    for k, l in reqs:
        for h in range(1, n + 1):
            if h in (k, l):
                continue
            terms = [(f"z_{k}_{l}_{i}_{h}", 1.0) for i, j in arcs if j == h]
            terms += [(f"z_{k}_{l}_{h}_{j}", -1.0) for i, j in arcs if i == h]
            model.add_constraint(Constraint(f"flow_{k}_{l}_{h}", terms, "=", 0.0))

    for i, j in arcs:
        terms = [(f"th_{i}_{j}", 1.0)]
        terms += [(f"z_{k}_{l}_{i}_{j}", -inst.w(k, l)) for k, l in reqs]
        model.add_constraint(Constraint(f"thdef_{i}_{j}", terms, "=", 0.0))

    for i, j in arcs:
        if ts.t1_conditional_arc_flow:
            model.add_constraint(
                Constraint(f"condcap_{i}_{j}", [(f"th_{i}_{j}", 1.0), (f"x_{i}_{j}", -inst.capacity)], "<=", 0.0)
            )
        else:
            model.add_constraint(
                Constraint(f"cap_{i}_{j}", [(f"th_{i}_{j}", 1.0)], "<=", inst.capacity)
            )

    if ts.t3_single_node_demand:
        for row in single_node_demand_rows(inst):
            model.add_constraint(row)

    model.validate()
    return model


def build_triples(inst: Instance, ts: TechniqueSet | None = None) -> MipModel:
    """Triples formulation: request paths become flow-splitting variables."""
    ts = ts or TechniqueSet()
    ts.check(TRIPLES)
    n = inst.n
    arcs = arc_set(n)
    triples = triple_set(n)

    model = MipModel(
        name=f"bpmp_triples_n{n}",
        metadata={"formulation": TRIPLES, "techniques": ts.to_list(), "n": n},
    )
    _route_variables(inst, model, priority_x=0)
    for i, j, k in triples:
        model.add_variable(Variable(name=f"u_{i}_{j}_{k}"))
    _flow_and_sequence_variables(inst, model, t7=False)

    _route_constraints(inst, model, TechniqueSet(), node_degree=ts.t11_enforce_node_degree)

    by_first_arc: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    by_remainder: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    by_pair: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for t in triples:
        i, j, k = t
        by_first_arc.setdefault((i, k), []).append(t)
        by_remainder.setdefault((k, j), []).append(t)
        by_pair.setdefault((i, j), []).append(t)

    for i, j in arcs:
        terms = [(f"th_{i}_{j}", 1.0)]
        if inst.w(i, j) > 0:
            terms.append((f"y_{i}_{j}", -inst.w(i, j)))
        for a, b, c in by_first_arc.get((i, j), ()):
            terms.append((f"u_{a}_{b}_{c}", -1.0))
        for a, b, c in by_remainder.get((i, j), ()):
            terms.append((f"u_{a}_{b}_{c}", -1.0))
        for a, b, c in by_pair.get((i, j), ()):
            terms.append((f"u_{a}_{b}_{c}", 1.0))
        model.add_constraint(Constraint(f"balance_{i}_{j}", terms, "=", 0.0))

    for i, j in arcs:
        model.add_constraint(
            Constraint(f"condcap_{i}_{j}", [(f"th_{i}_{j}", 1.0), (f"x_{i}_{j}", -inst.capacity)], "<=", 0.0)
        )

    if not ts.t10_relax_triples_linking:
        for i, j, k in triples:
            model.add_constraint(
                Constraint(f"linkux_{i}_{j}_{k}", [(f"u_{i}_{j}_{k}", 1.0), (f"x_{i}_{k}", -inst.capacity)], "<=", 0.0)
            )

    model.validate()
    return model


def build(inst: Instance, formulation: str, ts: TechniqueSet | None = None) -> MipModel:
    if formulation == NODE_ARC:
        return build_node_arc(inst, ts)
    if formulation == TRIPLES:
        return build_triples(inst, ts)
    raise ValueError(f"unknown formulation {formulation!r}")
