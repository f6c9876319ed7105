"""Composite Index Method: speedups, weighted indices, and the grand
composite index that drives adopt/reject decisions.

The chain, per problem size: per-instance speedups (baseline average
divided by challenger average, per metric) -> min/mean/median/max
statistics -> one weighted index per metric -> one index per size ->
a size-weighted grand index.  A challenger is adopted iff GCI > 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from statistics import mean, median

from ..formulations import TechniqueSet, apply_preset
from ..instance import Instance
from .measure import RunMeasurement

METRICS = ("cpu", "ticks", "real")
STAT_NAMES = ("min", "mean", "median", "max")
RATIO_FLOOR = 1e-6  # floor on both sides of a speedup ratio


@dataclass(frozen=True)
class Stats4:
    """Order statistics of per-instance speedups: min, mean, median, max."""

    minimum: float
    mean: float
    median: float
    maximum: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.minimum, self.mean, self.median, self.maximum)

    def check(self) -> None:
        if not (self.minimum <= self.median <= self.maximum):
            raise ValueError("speedup stats violate min <= median <= max")
        if not (self.minimum <= self.mean <= self.maximum):
            raise ValueError("speedup stats violate min <= mean <= max")
        if min(self.as_tuple()) <= 0:
            raise ValueError("speedups must be positive")

    @classmethod
    def of(cls, ratios: list[float]) -> "Stats4":
        return cls(min(ratios), mean(ratios), median(ratios), max(ratios))


@dataclass(frozen=True)
class SpeedupStats:
    """Per-metric speedup statistics for one problem size."""

    cpu: Stats4
    ticks: Stats4
    real: Stats4
    per_instance: dict[str, dict[str, float]] | None = None  # metric -> id -> ratio

    def metric(self, name: str) -> Stats4:
        return getattr(self, name)

    def check(self) -> None:
        for m in METRICS:
            self.metric(m).check()


@dataclass(frozen=True)
class WeightScheme:
    """CIM weights: statistic weights, metric weights, and size weights."""

    stat_weights: dict[str, float]
    metric_weights: dict[str, float]
    size_weights: dict[int, float]

    def check(self) -> None:
        for group, keys in (
            (self.stat_weights, STAT_NAMES),
            (self.metric_weights, METRICS),
        ):
            missing = [k for k in keys if k not in group]
            if missing:
                raise ValueError(f"weight scheme missing keys {missing}")
        for group in (self.stat_weights, self.metric_weights, self.size_weights):
            if any(v < 0 for v in group.values()):
                raise ValueError("weights must be nonnegative")
            if sum(group.values()) <= 0:
                raise ValueError("each weight group must have positive total")

    @classmethod
    def node_arc_default(cls) -> "WeightScheme":
        return cls(
            stat_weights={"min": 0.5, "mean": 10.0, "median": 40.0, "max": 0.5},
            metric_weights={"cpu": 6.0, "ticks": 8.0, "real": 8.0},
            size_weights={10: 1.0, 20: 10.0, 30: 12.0},
        )

    @classmethod
    def triples_default(cls) -> "WeightScheme":
        base = cls.node_arc_default()
        return replace(base, size_weights={10: 6.0, 20: 10.0, 30: 13.0, 40: 14.0, 50: 16.0})

    def with_uniform_sizes(self, sizes) -> "WeightScheme":
        return replace(self, size_weights={int(s): 1.0 for s in sizes})

    def to_json(self) -> str:
        doc = {
            "stat_weights": self.stat_weights,
            "metric_weights": self.metric_weights,
            "size_weights": {str(k): v for k, v in self.size_weights.items()},
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "WeightScheme":
        doc = json.loads(text)
        scheme = cls(
            stat_weights={k: float(v) for k, v in doc["stat_weights"].items()},
            metric_weights={k: float(v) for k, v in doc["metric_weights"].items()},
            size_weights={int(k): float(v) for k, v in doc["size_weights"].items()},
        )
        scheme.check()
        return scheme


def speedups(baseline: list[RunMeasurement], challenger: list[RunMeasurement]) -> SpeedupStats:
    """Per-instance speedup ratios and their statistics across instances.

    CPU and real ratios divide trial means; ticks divides the single
    deterministic counts.  Both sides are floored at 1e-6 first.
    """
    base_by_id = {m.instance_id: m for m in baseline}
    chal_by_id = {m.instance_id: m for m in challenger}
    if set(base_by_id) != set(chal_by_id):
        raise ValueError(
            f"instance sets differ: baseline {sorted(base_by_id)} vs challenger {sorted(chal_by_id)}"
        )
    if not base_by_id:
        raise ValueError("at least one instance is required")

    def ratio(num: float, den: float) -> float:
        return max(num, RATIO_FLOOR) / max(den, RATIO_FLOOR)

    per: dict[str, dict[str, float]] = {m: {} for m in METRICS}
    for iid in sorted(base_by_id):
        b, c = base_by_id[iid], chal_by_id[iid]
        per["cpu"][iid] = ratio(b.avg_cpu, c.avg_cpu)
        per["real"][iid] = ratio(b.avg_wall, c.avg_wall)
        per["ticks"][iid] = ratio(b.ticks, c.ticks)

    stats = SpeedupStats(
        cpu=Stats4.of([per["cpu"][i] for i in sorted(per["cpu"])]),
        ticks=Stats4.of([per["ticks"][i] for i in sorted(per["ticks"])]),
        real=Stats4.of([per["real"][i] for i in sorted(per["real"])]),
        per_instance=per,
    )
    stats.check()
    return stats


def composite_metric_index(stats: Stats4, stat_weights: dict[str, float]) -> float:
    """Weighted mean of the four order statistics for one metric."""
    total = sum(stat_weights[k] for k in STAT_NAMES)
    if total <= 0:
        raise ValueError("statistic weights sum to zero")
    s = (
        stat_weights["min"] * stats.minimum
        + stat_weights["mean"] * stats.mean
        + stat_weights["median"] * stats.median
        + stat_weights["max"] * stats.maximum
    )
    return s / total


def size_index(c_index: float, t_index: float, r_index: float, metric_weights: dict[str, float]) -> float:
    """Metric-weighted combination of the per-metric indices for one size."""
    total = metric_weights["cpu"] + metric_weights["ticks"] + metric_weights["real"]
    if total <= 0:
        raise ValueError("metric weights sum to zero")
    return (
        metric_weights["cpu"] * c_index
        + metric_weights["ticks"] * t_index
        + metric_weights["real"] * r_index
    ) / total


def grand_composite(index_by_size: dict[int, float], size_weights: dict[int, float]) -> float:
    """Size-weighted mean of the per-size indices."""
    missing = [s for s in index_by_size if s not in size_weights]
    if missing:
        raise ValueError(f"no size weight for sizes {sorted(missing)}")
    total = sum(size_weights[s] for s in sorted(index_by_size))
    if total <= 0:
        raise ValueError("size weights sum to zero over the present sizes")
    acc = 0.0
    for s in sorted(index_by_size):
        acc += size_weights[s] * index_by_size[s]
    return acc / total


@dataclass
class SizeReport:
    size: int
    stats: SpeedupStats
    c_index: float
    t_index: float
    r_index: float
    i_index: float


@dataclass
class CompositeReport:
    baseline_label: str
    challenger_label: str
    sizes: list[SizeReport]
    gci: float
    decision: str  # "adopt" | "reject"
    weights: WeightScheme
    measurements: dict[int, dict[str, list[RunMeasurement]]] = field(default_factory=dict)


def composite_report(
    stats_by_size: dict[int, SpeedupStats],
    weights: WeightScheme,
    baseline_label: str = "baseline",
    challenger_label: str = "challenger",
) -> CompositeReport:
    """Run the index chain over per-size speedup statistics."""
    weights.check()
    size_reports = []
    index_by_size: dict[int, float] = {}
    for size in sorted(stats_by_size):
        st = stats_by_size[size]
        c = composite_metric_index(st.cpu, weights.stat_weights)
        t = composite_metric_index(st.ticks, weights.stat_weights)
        r = composite_metric_index(st.real, weights.stat_weights)
        i = size_index(c, t, r, weights.metric_weights)
        index_by_size[size] = i
        size_reports.append(SizeReport(size, st, c, t, r, i))
    gci = grand_composite(index_by_size, weights.size_weights)
    decision = "adopt" if gci > 1.0 else "reject"
    return CompositeReport(
        baseline_label=baseline_label,
        challenger_label=challenger_label,
        sizes=size_reports,
        gci=gci,
        decision=decision,
        weights=weights,
    )


@dataclass(frozen=True)
class ApproachConfig:
    """A solution approach: formulation plus technique set.  Separation
    flags (t8/t9) activate the cutting-plane loop during measurement."""

    formulation: str
    techniques: TechniqueSet
    label: str = ""

    @classmethod
    def from_preset(cls, name: str) -> "ApproachConfig":
        formulation, ts = apply_preset(name)
        return cls(formulation=formulation, techniques=ts, label=name)

    def describe(self) -> str:
        flags = self.techniques.to_list()
        return self.label or f"{self.formulation}[{flags or 'original'}]"


def _measure_config(
    config: ApproachConfig,
    instances_by_size: dict[int, list[tuple[str, Instance]]],
    trials: int,
    backend: str | None,
) -> dict[int, list[RunMeasurement]]:
    from ..formulations import build
    from .measure import measure_builtin

    out: dict[int, list[RunMeasurement]] = {}
    for size in sorted(instances_by_size):
        runs = []
        for iid, inst in instances_by_size[size]:
            model = build(inst, config.formulation, config.techniques)
            runs.append(
                measure_builtin(
                    model,
                    trials,
                    families=config.techniques.cut_families(),
                    instance=inst,
                    instance_id=iid,
                    backend=backend,
                )
            )
        out[size] = runs
    return out


def evaluate_technique(
    incumbent: ApproachConfig,
    challenger: ApproachConfig,
    instances_by_size: dict[int, list[tuple[str, Instance]]],
    weights: WeightScheme,
    trials: int = 3,
    given_stats: dict[int, SpeedupStats] | None = None,
    backend: str | None = None,
) -> CompositeReport:
    """Measure both configurations on every instance and run the CIM chain.

    `given_stats` supplies speedup statistics for sizes measured
    elsewhere (entered directly into the index computation).
    """
    if not instances_by_size and not given_stats:
        raise ValueError("no instances and no given statistics")
    base_runs = _measure_config(incumbent, instances_by_size, trials, backend)
    chal_runs = _measure_config(challenger, instances_by_size, trials, backend)
    stats_by_size: dict[int, SpeedupStats] = dict(given_stats or {})
    for size in sorted(instances_by_size):
        stats_by_size[size] = speedups(base_runs[size], chal_runs[size])
    report = composite_report(
        stats_by_size, weights, incumbent.describe(), challenger.describe()
    )
    report.measurements = {
        size: {"baseline": base_runs[size], "challenger": chal_runs[size]}
        for size in sorted(instances_by_size)
    }
    return report


def sequential_evaluation(
    initial: ApproachConfig,
    technique_order: list[str],
    instances_by_size: dict[int, list[tuple[str, Instance]]],
    weights: WeightScheme,
    trials: int = 3,
    backend: str | None = None,
) -> tuple[list[CompositeReport], ApproachConfig]:
    """Apply candidate techniques in order, folding in each adopted one.

    Returns the audit trail of reports plus the final incumbent.
    """
    incumbent = initial
    reports: list[CompositeReport] = []
    for tag in technique_order:
        ts = incumbent.techniques.with_flag(tag, True)
        ts.check(incumbent.formulation)
        challenger = ApproachConfig(
            formulation=incumbent.formulation,
            techniques=ts,
            label=f"{incumbent.describe()}+{tag}",
        )
        report = evaluate_technique(
            incumbent, challenger, instances_by_size, weights, trials, backend=backend
        )
        reports.append(report)
        if report.decision == "adopt":
            incumbent = challenger
    return reports, incumbent
