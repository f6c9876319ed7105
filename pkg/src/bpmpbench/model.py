"""Solver-independent MIP representation with LP- and MPS-format emission.

Models are canonically ordered (variables by name class then numeric
indices, constraints in builder family order) so that emission is
byte-stable and the built-in solver's work counters are reproducible.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

INF = math.inf

# Sort rank of variable name classes; route variables first.
_CLASS_RANK = {"x": 0, "y": 1, "z": 2, "u": 3, "th": 4, "s": 5}


def name_key(name: str) -> tuple:
    """Canonical sort key: (class rank, numeric indices).

    Unknown prefixes sort after the known classes, alphabetically.
    """
    parts = name.split("_")
    prefix = parts[0]
    idx = tuple(int(p) if p.isdigit() else -1 for p in parts[1:])
    return (_CLASS_RANK.get(prefix, len(_CLASS_RANK)), prefix, idx)


class ModelError(ValueError):
    """Raised for structurally invalid models."""


@dataclass
class Variable:
    name: str
    kind: str = "continuous"  # "binary" | "continuous"
    lower: float = 0.0
    upper: float = INF
    objective_coeff: float = 0.0
    branch_priority: int = 0

    def check(self) -> None:
        if self.kind not in ("binary", "continuous"):
            raise ModelError(f"variable {self.name}: unknown kind {self.kind!r}")
        if self.lower > self.upper:
            raise ModelError(f"variable {self.name}: lower bound exceeds upper bound")
        if self.kind == "binary" and not (0.0 <= self.lower and self.upper <= 1.0):
            raise ModelError(f"variable {self.name}: binary bounds must lie in [0, 1]")


@dataclass
class Constraint:
    name: str
    terms: list[tuple[str, float]]
    sense: str  # "<=" | "=" | ">="
    rhs: float

    def check(self) -> None:
        if self.sense not in ("<=", "=", ">="):
            raise ModelError(f"constraint {self.name}: unknown sense {self.sense!r}")
        seen = set()
        for var, _ in self.terms:
            if var in seen:
                raise ModelError(f"constraint {self.name}: duplicate variable {var}")
            seen.add(var)


@dataclass
class MipModel:
    """Maximization MIP.  Variables and constraints keep insertion order;
    builders insert canonically and validate() enforces uniqueness."""

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    direction: str = "maximize"

    def var_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def add_variable(self, var: Variable) -> Variable:
        self.variables.append(var)
        return var

    def add_constraint(self, con: Constraint) -> Constraint:
        self.constraints.append(con)
        return con

    def validate(self) -> None:
        names = set()
        for v in self.variables:
            v.check()
            if v.name in names:
                raise ModelError(f"duplicate variable name {v.name}")
            names.add(v.name)
        cnames = set()
        for c in self.constraints:
            c.check()
            if c.name in cnames:
                raise ModelError(f"duplicate constraint name {c.name}")
            cnames.add(c.name)
            for var, _ in c.terms:
                if var not in names:
                    raise ModelError(f"constraint {c.name}: unknown variable {var}")

    def copy_with_extra_constraints(self, extra: list[Constraint]) -> "MipModel":
        out = MipModel(
            name=self.name,
            variables=list(self.variables),
            constraints=list(self.constraints) + list(extra),
            metadata=dict(self.metadata),
        )
        return out


def model_stats(model: MipModel) -> dict[str, int]:
    """Exact counts: variables by kind, constraints, structural nonzeros."""
    binaries = sum(1 for v in model.variables if v.kind == "binary")
    return {
        "binary": binaries,
        "continuous": len(model.variables) - binaries,
        "variables": len(model.variables),
        "constraints": len(model.constraints),
        "nonzeros": sum(len(c.terms) for c in model.constraints),
    }


def _num(v: float) -> str:
    """Coefficient text: 12 significant digits, no trailing noise."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.12g}"


def _terms_text(terms: list[tuple[str, float]]) -> str:
    parts: list[str] = []
    for var, coeff in terms:
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        lead = f"{sign} " if parts else ("- " if sign == "-" else "")
        if mag == 1:
            parts.append(f"{lead}{var}")
        else:
            parts.append(f"{lead}{_num(mag)} {var}")
    if not parts:
        # all-zero row; keep a parseable placeholder term
        return f"0 {terms[0][0]}" if terms else "0 __none__"
    return " ".join(parts)


def emit_lp(model: MipModel) -> str:
    """CPLEX LP-format text; byte-deterministic for equal models."""
    model.validate()
    lines = [f"\\ {model.name}", "Maximize"]
    obj_terms = [(v.name, v.objective_coeff) for v in model.variables if v.objective_coeff != 0]
    if obj_terms:
        lines.append(" obj: " + _terms_text(obj_terms))
    elif model.variables:
        lines.append(f" obj: 0 {model.variables[0].name}")
    else:
        lines.append(" obj: 0 __none__")
    lines.append("Subject To")
    for c in model.constraints:
        lines.append(f" {c.name}: {_terms_text(c.terms)} {c.sense} {_num(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == "binary":
            continue
        lo = _num(v.lower) if v.lower != -INF else "-inf"
        if v.upper == INF:
            lines.append(f" {v.name} >= {lo}")
        else:
            lines.append(f" {lo} <= {v.name} <= {_num(v.upper)}")
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binaries")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def emit_mps(model: MipModel) -> str:
    """Free-form MPS text with OBJSENSE, integer markers, RHS and BOUNDS."""
    model.validate()
    lines = [f"NAME {model.name}", "OBJSENSE", "    MAX", "ROWS", " N  obj"]
    sense_tag = {"<=": "L", "=": "E", ">=": "G"}
    for c in model.constraints:
        lines.append(f" {sense_tag[c.sense]}  {c.name}")
    by_var: dict[str, list[tuple[str, float]]] = {v.name: [] for v in model.variables}
    for c in model.constraints:
        for var, coeff in c.terms:
            if coeff != 0:
                by_var[var].append((c.name, coeff))
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for v in model.variables:
        want_int = v.kind == "binary"
        if want_int != in_int:
            tag = "INTORG" if want_int else "INTEND"
            lines.append(f"    MARKER{marker}  'MARKER'  '{tag}'")
            marker += 1
            in_int = want_int
        entries = []
        if v.objective_coeff != 0:
            entries.append(("obj", v.objective_coeff))
        entries.extend(by_var[v.name])
        if not entries:
            entries.append(("obj", 0.0))
        for row, coeff in entries:
            lines.append(f"    {v.name}  {row}  {_num(coeff)}")
    if in_int:
        lines.append(f"    MARKER{marker}  'MARKER'  'INTEND'")
    lines.append("RHS")
    for c in model.constraints:
        if c.rhs != 0:
            lines.append(f"    rhs  {c.name}  {_num(c.rhs)}")
    lines.append("BOUNDS")
    for v in model.variables:
        if v.kind == "binary":
            lines.append(f" BV bnd  {v.name}")
            continue
        if v.lower != 0:
            lines.append(f" LO bnd  {v.name}  {_num(v.lower)}")
        if v.upper != INF:
            lines.append(f" UP bnd  {v.name}  {_num(v.upper)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w]*)")


def _parse_terms(text: str) -> list[tuple[str, float]]:
    out: list[tuple[str, float]] = []
    for sign, num, var in _TERM_RE.findall(text):
        coeff = float(num) if num else 1.0
        if sign == "-":
            coeff = -coeff
        if var == "__zero__":
            continue
        out.append((var, coeff))
    return out


def parse_lp(text: str) -> MipModel:
    """Reader for the LP subset produced by emit_lp (round-trip use)."""
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("\\")]
    model = MipModel(name="parsed_lp")
    section = None
    vars_seen: dict[str, Variable] = {}

    def touch(name: str) -> Variable:
        if name not in vars_seen:
            vars_seen[name] = Variable(name=name)
            model.variables.append(vars_seen[name])
        return vars_seen[name]

    for ln in lines:
        stripped = ln.strip()
        low = stripped.lower()
        if low in ("maximize", "minimize", "subject to", "bounds", "binaries", "end"):
            section = low
            continue
        if section == "maximize":
            body = stripped.split(":", 1)[1] if ":" in stripped else stripped
            for var, coeff in _parse_terms(body):
                touch(var).objective_coeff += coeff
        elif section == "subject to":
            name, body = stripped.split(":", 1)
            m = re.search(r"(<=|>=|=)\s*([-\d.eE+]+)\s*$", body)
            if not m:
                raise ModelError(f"cannot parse constraint line: {ln!r}")
            sense, rhs = m.group(1), float(m.group(2))
            terms = _parse_terms(body[: m.start()])
            for var, _ in terms:
                touch(var)
            model.constraints.append(Constraint(name=name.strip(), terms=terms, sense=sense, rhs=rhs))
        elif section == "bounds":
            m = re.match(r"([-\d.eE+]+|-inf)\s*<=\s*(\w+)\s*<=\s*([-\d.eE+]+)", stripped)
            if m:
                v = touch(m.group(2))
                v.lower = -INF if m.group(1) == "-inf" else float(m.group(1))
                v.upper = float(m.group(3))
                continue
            m = re.match(r"(\w+)\s*>=\s*([-\d.eE+]+)", stripped)
            if m:
                v = touch(m.group(1))
                v.lower = float(m.group(2))
                v.upper = INF
                continue
            raise ModelError(f"cannot parse bounds line: {ln!r}")
        elif section == "binaries":
            for name in stripped.split():
                v = touch(name)
                v.kind = "binary"
                v.lower, v.upper = 0.0, 1.0
    model.validate()
    return model


def parse_mps(text: str) -> MipModel:
    """Reader for the free-MPS subset produced by emit_mps."""
    model = MipModel(name="parsed_mps")
    section = None
    senses: dict[str, str] = {}
    row_order: list[str] = []
    vars_seen: dict[str, Variable] = {}
    terms: dict[str, list[tuple[str, float]]] = {}
    rhs: dict[str, float] = {}
    in_int = False
    sense_map = {"L": "<=", "E": "=", "G": ">="}

    for ln in text.splitlines():
        stripped = ln.strip()
        if not stripped:
            continue
        upper = stripped.upper()
        if upper.startswith("NAME"):
            model.name = stripped.split(None, 1)[1] if len(stripped.split()) > 1 else "parsed_mps"
            continue
        if upper in ("OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "ENDATA"):
            section = upper
            continue
        if section == "OBJSENSE":
            if upper not in ("MAX", "MAXIMIZE"):
                raise ModelError(f"unsupported objective sense {stripped!r}")
            continue
        if section == "ROWS":
            tag, name = stripped.split()
            if tag == "N":
                continue
            senses[name] = sense_map[tag]
            row_order.append(name)
            terms[name] = []
            continue
        if section == "COLUMNS":
            if "'MARKER'" in stripped:
                in_int = "'INTORG'" in stripped
                continue
            var, row, coeff = stripped.split()
            if var not in vars_seen:
                kind = "binary" if in_int else "continuous"
                v = Variable(name=var, kind=kind, upper=1.0 if in_int else INF)
                vars_seen[var] = v
                model.variables.append(v)
            if row == "obj":
                vars_seen[var].objective_coeff += float(coeff)
            else:
                terms[row].append((var, float(coeff)))
            continue
        if section == "RHS":
            _, row, value = stripped.split()
            rhs[row] = float(value)
            continue
        if section == "BOUNDS":
            parts = stripped.split()
            tag, var = parts[0], parts[2]
            v = vars_seen[var]
            if tag == "BV":
                v.kind, v.lower, v.upper = "binary", 0.0, 1.0
            elif tag == "LO":
                v.lower = float(parts[3])
            elif tag == "UP":
                v.upper = float(parts[3])
            else:
                raise ModelError(f"unsupported bound tag {tag!r}")
            continue

    for name in row_order:
        model.constraints.append(
            Constraint(name=name, terms=terms[name], sense=senses[name], rhs=rhs.get(name, 0.0))
        )
    model.validate()
    return model
